#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "config.hpp"

using dsmcli::Config;
using dsmcli::ConfigError;

namespace {

std::string write_tmp(const std::string& name, const std::string& text) {
    const auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream(p) << text;
    return p.string();
}

}  // namespace

TEST(Config, ReadsSectionsAndOverrides) {
    const auto path = write_tmp("dsm_cfg_ok.ini", "[schedule]\nkind = power\nnu = 0.5\n[problem]\nbenchmark = scalar-cubic\n");
    const auto c = Config::load(path, {"schedule.nu=0.75"});
    EXPECT_EQ(c.str("schedule.kind", ""), "power");
    EXPECT_DOUBLE_EQ(c.num("schedule.nu", 0.0), 0.75);
    EXPECT_DOUBLE_EQ(c.num("schedule.eps0", 3.0), 3.0);
    EXPECT_EQ(c.str("problem.benchmark", ""), "scalar-cubic");
}

TEST(Config, RejectsUnknownKeys) {
    const auto path = write_tmp("dsm_cfg_bad.ini", "[schedule]\ncolour = red\n");
    EXPECT_THROW((void)Config::load(path, {}), ConfigError);
    EXPECT_THROW((void)Config::load(std::nullopt, {"nosection=1"}), ConfigError);
    EXPECT_THROW((void)Config::load(std::nullopt, {"schedule.nu"}), ConfigError);
}

TEST(Config, RejectsTopLevelKeys) {
    const auto path = write_tmp("dsm_cfg_top.ini", "kind = power\n");
    EXPECT_THROW((void)Config::load(path, {}), ConfigError);
}

TEST(Config, MissingFile) { EXPECT_THROW((void)Config::load(std::string("/nonexistent/x.ini"), {}), ConfigError); }

TEST(Config, TypedGetters) {
    const auto c = Config::load(std::nullopt, {"feigenbaum.z=13, 14,15", "feigenbaum.n_max=12",
                                               "feigenbaum.require_concave=yes", "integrator.t_max=abc",
                                               "integrator.max_steps=2.5"});
    EXPECT_EQ(c.num_list("feigenbaum.z", {}), (std::vector<double>{13, 14, 15}));
    EXPECT_EQ(c.integer("feigenbaum.n_max", 0), 12);
    EXPECT_TRUE(c.flag("feigenbaum.require_concave", false));
    EXPECT_THROW((void)c.num("integrator.t_max", 0.0), ConfigError);
    EXPECT_THROW((void)c.integer("integrator.max_steps", 0), ConfigError);
}
