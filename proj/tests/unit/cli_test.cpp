#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>

#include "hmt/common/text.hpp"
#include "hmt/log/timeline.hpp"
#include "hmt/world/config.hpp"

namespace fs = std::filesystem;

namespace {

struct Scratch {
    fs::path dir = fs::temp_directory_path() / ("hmt_cli_test_" + std::to_string(::getpid()));
    Scratch() {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
};

fs::path scratch() {
    static const Scratch s;
    return s.dir;
}

// Runs a command with output silenced; returns its exit status.
int run(const std::string& args, const std::string& binary = HMT_CLI) {
    const std::string cmd = binary + " " + args + " >" + (scratch() / "stdout.txt").string() + " 2>" +
                            (scratch() / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string last_stdout() { return hmt::read_file(scratch() / "stdout.txt"); }
std::string last_stderr() { return hmt::read_file(scratch() / "stderr.txt"); }

}  // namespace

TEST(Cli, UsageErrorsExitWithTwo) {
    EXPECT_EQ(run(""), 2);
    EXPECT_EQ(run("--bogus"), 2);
    EXPECT_EQ(run("episode --ai robot"), 2);
    EXPECT_NE(last_stderr().find("--ai"), std::string::npos);
    EXPECT_EQ(run("validate /nonexistent/timeline.json"), 2);
    EXPECT_EQ(run("serve --port 70000"), 2);
    EXPECT_EQ(run("--help"), 0);
}

TEST(Cli, RuntimeErrorsExitWithOne) {
    const auto bad = scratch() / "bad.json";
    hmt::write_file(bad, "[1, 2");
    EXPECT_EQ(run("validate " + bad.string()), 1);
    EXPECT_NE(last_stderr().find("schema_invalid"), std::string::npos);
    EXPECT_EQ(run("config " + bad.string()), 1);
    EXPECT_EQ(run("--server ws://127.0.0.1:1/play", HMT_DT_AGENT), 1);
    EXPECT_EQ(run("--context /nonexistent/ctx.md --rules-only", HMT_CMD_AGENT), 1);
    EXPECT_NE(last_stderr().find("missing_file"), std::string::npos);
    EXPECT_EQ(run("--llm http://x --mock-llm y", HMT_CMD_AGENT), 2);
}

TEST(Cli, EpisodeExportAndValidate) {
    const auto missions = scratch() / "missions";
    ASSERT_EQ(run("episode --seed 3 --missions-dir " + missions.string()), 0);
    EXPECT_NE(last_stdout().find("house-dt-seed3: success"), std::string::npos) << last_stdout();
    const auto dir = missions / "house-dt-seed3";
    for (const char* f : {"timeline.json", "capture.bin", "context.md"}) EXPECT_TRUE(fs::exists(dir / f)) << f;

    ASSERT_EQ(run("validate " + (dir / "timeline.json").string()), 0);
    const auto out = scratch() / "events.json";
    ASSERT_EQ(run("export " + dir.string() + " --bare-array -o " + out.string()), 0);
    const auto events = nlohmann::json::parse(hmt::read_file(out));
    ASSERT_TRUE(events.is_array());
    EXPECT_EQ(events.size(), hmt::log::load_timeline(dir / "timeline.json").events.size());
}

TEST(Cli, ConfigPresetsRoundTrip) {
    for (const char* preset : {"default", "relaxed", "long"}) {
        ASSERT_EQ(run(std::string("config ") + preset), 0) << preset;
        const auto path = scratch() / (std::string(preset) + ".toml");
        hmt::write_file(path, last_stdout());
        const auto parsed = hmt::world::load_config(path);
        EXPECT_EQ(hmt::world::to_toml(parsed), last_stdout());
    }
    EXPECT_EQ(hmt::world::load_config(scratch() / "default.toml"), hmt::world::default_config());
}

TEST(Cli, CommandEpisodeWritesConversation) {
    const auto missions = scratch() / "cmd";
    ASSERT_EQ(run("episode --ai cmd --seed 2 --command \"get 2 wood\" --missions-dir " + missions.string()), 0);
    const auto conv = nlohmann::json::parse(hmt::read_file(missions / "house-cmd-seed2" / "conversation.json"));
    ASSERT_GE(conv["entries"].size(), 2u);
    EXPECT_EQ(conv["entries"][0]["text"], "get 2 wood");
}
