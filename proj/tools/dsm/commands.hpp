#pragma once

#include <optional>
#include <string>
#include <vector>

namespace dsmcli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kConfigError = 2;
inline constexpr int kFlowError = 3;
inline constexpr int kAllFailed = 4;
inline constexpr int kAssertionFailed = 5;
inline constexpr int kTooFewSamples = 6;

struct CommonOptions {
    std::optional<std::string> config;
    std::optional<std::string> out;  // overrides output.dir; default dsm-out
    int workers = 1;
    bool strict = false;
    std::optional<std::string> seed_bench;
    std::vector<std::string> overrides;  // section.key=value
};

int cmd_solve(const CommonOptions& opt);
int cmd_feigenbaum(const CommonOptions& opt);
int cmd_inequality(const CommonOptions& opt);
int cmd_rates(const CommonOptions& opt);
int cmd_check_schedule(const CommonOptions& opt);

}  // namespace dsmcli
