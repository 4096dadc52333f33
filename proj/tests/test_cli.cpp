#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout and stderr, merged
};

CliResult run_cli(const std::string& args, const std::string& env = "") {
    const std::string cmd =
        (env.empty() ? "" : env + " ") + std::string(ENTROGATE_BIN) + " " +
        args + " 2>&1";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult result;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0)
        result.output.append(buf, n);
    const int status = ::pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("entrogate_cli_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string str() const { return path.string(); }
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

json load_json(const fs::path& p) { return json::parse(read_file(p)); }

}  // namespace

TEST_CASE("help and version exit clean; missing subcommands do not") {
    const auto help = run_cli("--help");
    CHECK(help.exit_code == 0);
    CHECK(help.output.find("run") != std::string::npos);
    CHECK(help.output.find("ablate") != std::string::npos);
    CHECK(help.output.find("synth") != std::string::npos);
    CHECK(help.output.find("stats") != std::string::npos);

    const auto version = run_cli("--version");
    CHECK(version.exit_code == 0);
    CHECK(version.output.find("entrogate") != std::string::npos);

    CHECK(run_cli("").exit_code == 2);
    CHECK(run_cli("transcode").exit_code == 2);
    CHECK(run_cli("run --no-such-flag").exit_code == 2);
}

TEST_CASE("configuration mistakes exit 2 and say what is wrong") {
    TempDir dir;
    const auto bad_alpha =
        run_cli("run --alpha -1 --virtual-clock 33ms --frames 3 --out " +
                dir.str());
    CHECK(bad_alpha.exit_code == 2);
    CHECK(bad_alpha.output.find("alpha must be >= 0") != std::string::npos);

    const auto bad_frames = run_cli("synth --frames 0 -o " + dir.str() +
                                    "/x.raw");
    CHECK(bad_frames.exit_code == 2);
    CHECK(bad_frames.output.find("frame count must be >= 1") !=
          std::string::npos);

    CHECK(run_cli("synth --frames 3").exit_code == 2);  // -o is required

    const auto bad_clock = run_cli("run --virtual-clock never --frames 3");
    CHECK(bad_clock.exit_code == 2);

    const auto bad_capacity =
        run_cli("run --buffer-capacity 0 --virtual-clock 33ms --frames 3");
    CHECK(bad_capacity.exit_code == 2);
    CHECK(bad_capacity.output.find("capacity") != std::string::npos);
}

TEST_CASE("missing inputs exit 1 and name the path") {
    TempDir dir;
    const auto missing_y4m =
        run_cli("run --input " + dir.str() + "/absent.y4m --frames 3");
    CHECK(missing_y4m.exit_code == 1);
    CHECK(missing_y4m.output.find("absent.y4m") != std::string::npos);

    const auto missing_raw = run_cli("run --input " + dir.str() +
                                     "/absent.raw --width 8 --height 8");
    CHECK(missing_raw.exit_code == 1);
    CHECK(missing_raw.output.find("absent.raw") != std::string::npos);
}

TEST_CASE("config files support comments, reject unknown keys, and report "
          "parse positions") {
    TempDir dir;
    const auto good = dir.path / "good.json";
    write_file(good, R"({
  // gate weights
  "alpha": 0.5,
  /* stream shape */
  "scene": "static",
  "frames": 7,
  "clock": "virtual"
})");
    const auto ok = run_cli("run --config " + good.string() + " --out " +
                            dir.str());
    CHECK(ok.exit_code == 0);

    const auto unknown = dir.path / "unknown.json";
    write_file(unknown, R"({"alpa": 0.5})");
    const auto bad_key = run_cli("run --config " + unknown.string());
    CHECK(bad_key.exit_code == 2);
    CHECK(bad_key.output.find("unknown key 'alpa'") != std::string::npos);

    const auto broken = dir.path / "broken.json";
    write_file(broken, "{\n  \"alpha\": 0.5,\n}");
    const auto bad_json = run_cli("run --config " + broken.string());
    CHECK(bad_json.exit_code == 2);
    CHECK(bad_json.output.find("line 3") != std::string::npos);

    const auto absent = run_cli("run --config " + dir.str() + "/nope.json");
    CHECK(absent.exit_code == 2);

    const auto wrong_type = dir.path / "type.json";
    write_file(wrong_type, R"({"alpha": "high"})");
    const auto bad_type = run_cli("run --config " + wrong_type.string());
    CHECK(bad_type.exit_code == 2);
    CHECK(bad_type.output.find("alpha") != std::string::npos);
}

TEST_CASE("flags beat config file values which beat defaults") {
    TempDir dir;
    const auto cfg = dir.path / "layered.json";
    write_file(cfg, R"({
  "alpha": 0.1,
  "beta": 0.2,
  "frames": 7,
  "scene": "static",
  "seed": 5,
  "clock": "virtual"
})");
    const auto result =
        run_cli("run --config " + cfg.string() + " --alpha 0.9 --out " +
                dir.str());
    REQUIRE(result.exit_code == 0);

    const json doc = load_json(dir.path / "metrics.json");
    CHECK(doc["schema"] == "entrogate.metrics.v1");
    CHECK(doc["config"]["alpha"] == 0.9);      // flag over file
    CHECK(doc["config"]["beta"] == 0.2);       // file over default
    CHECK(doc["config"]["threshold"] == 3.0);  // untouched default
    CHECK(doc["config"]["source"]["frames"] == 7);
    CHECK(doc["config"]["source"]["scene"] == "static");
    CHECK(doc["config"]["source"]["seed"] == 5);
    CHECK(doc["config"]["detector"]["seed"] == 5);  // one seed feeds both
    CHECK(doc["config"]["clock_mode"] == "virtual");
    CHECK(doc["counters"]["frames_ingested"] == 7);
}

TEST_CASE("run writes the reports it promises and echoes counters") {
    TempDir dir;
    const auto result = run_cli(
        "run --scene composite --redundancy 0.5 --seed 3 --frames 40 "
        "--virtual-clock 33ms --out " +
        dir.str());
    REQUIRE(result.exit_code == 0);
    CHECK(result.output.find("ingested=40") != std::string::npos);
    CHECK(result.output.find("throughput_fps=") != std::string::npos);
    CHECK(result.output.find("wrote ") != std::string::npos);

    const json doc = load_json(dir.path / "metrics.json");
    CHECK(doc["counters"]["frames_ingested"] == 40);
    CHECK(doc["reference_comparison"]["reference_latency_sd_ms"] == 1.2);

    const std::string ledger = read_file(dir.path / "ledger.csv");
    size_t lines = 0;
    for (char c : ledger) lines += c == '\n' ? 1 : 0;
    CHECK(lines == 41);  // header + one row per frame
    CHECK(ledger.rfind("frame_id,", 0) == 0);
}

TEST_CASE("simulated runs reproduce their reports byte for byte") {
    TempDir a, b;
    const std::string args =
        "run --scene composite --redundancy 0.4 --seed 11 --frames 60 "
        "--virtual-clock 33ms --buffer-capacity 4 --out ";
    REQUIRE(run_cli(args + a.str()).exit_code == 0);
    REQUIRE(run_cli(args + b.str()).exit_code == 0);
    CHECK(read_file(a.path / "metrics.json") ==
          read_file(b.path / "metrics.json"));
    CHECK(read_file(a.path / "ledger.csv") ==
          read_file(b.path / "ledger.csv"));
}

TEST_CASE("synth writes exact raw bytes and matching y4m streams") {
    TempDir dir;
    const auto raw = run_cli(
        "synth --scene static --seed 9 --frames 10 -o " + dir.str() +
        "/ten.raw");
    REQUIRE(raw.exit_code == 0);
    CHECK(raw.output.find("wrote 10 frames (320x240, raw)") !=
          std::string::npos);
    CHECK(fs::file_size(dir.path / "ten.raw") == 10u * 320 * 240);

    // Re-synthesis is byte-identical.
    REQUIRE(run_cli("synth --scene static --seed 9 --frames 10 -o " +
                    dir.str() + "/ten2.raw")
                .exit_code == 0);
    CHECK(read_file(dir.path / "ten.raw") ==
          read_file(dir.path / "ten2.raw"));

    const auto y4m = run_cli("synth --scene moving --seed 9 --frames 4 "
                             "--width 64 --height 48 -o " +
                             dir.str() + "/clip.y4m");
    REQUIRE(y4m.exit_code == 0);
    const std::string stream = read_file(dir.path / "clip.y4m");
    CHECK(stream.rfind("YUV4MPEG2 ", 0) == 0);
    CHECK(stream.find("Cmono") != std::string::npos);
    CHECK(stream.find("W64") != std::string::npos);

    const auto inspect = run_cli(
        "synth --scene noise --seed 2 --frames 3 --width 32 --height 32 "
        "--inspect -o " +
        dir.str() + "/n.raw");
    REQUIRE(inspect.exit_code == 0);
    CHECK(inspect.output.find("frame_id\tentropy_bits\tdelta_h_bits") !=
          std::string::npos);
    CHECK(inspect.output.find("0\t") != std::string::npos);
    CHECK(inspect.output.find("2\t") != std::string::npos);
}

TEST_CASE("synthesized files feed back into the pipeline") {
    TempDir dir;
    REQUIRE(run_cli("synth --scene composite --redundancy 0.5 --seed 13 "
                    "--frames 20 --width 64 --height 48 -o " +
                    dir.str() + "/in.y4m")
                .exit_code == 0);
    const auto y4m_run = run_cli("run --input " + dir.str() +
                                 "/in.y4m --virtual-clock 33ms --out " +
                                 dir.str() + "/y4m_out");
    REQUIRE(y4m_run.exit_code == 0);
    const json y4m_doc = load_json(dir.path / "y4m_out" / "metrics.json");
    CHECK(y4m_doc["counters"]["frames_ingested"] == 20);
    CHECK(y4m_doc["config"]["source"]["kind"] == "y4m");

    REQUIRE(run_cli("synth --scene static --seed 13 --frames 6 --width 32 "
                    "--height 24 -o " +
                    dir.str() + "/in.raw")
                .exit_code == 0);
    const auto raw_run = run_cli(
        "run --input " + dir.str() +
        "/in.raw --width 32 --height 24 --virtual-clock 33ms --out " +
        dir.str() + "/raw_out");
    REQUIRE(raw_run.exit_code == 0);
    const json raw_doc = load_json(dir.path / "raw_out" / "metrics.json");
    CHECK(raw_doc["counters"]["frames_ingested"] == 6);
    CHECK(raw_doc["config"]["source"]["kind"] == "raw");

    // A raw stream with a geometry mismatch is caught, not misread.
    const auto misread = run_cli(
        "run --input " + dir.str() +
        "/in.raw --width 33 --height 24 --virtual-clock 33ms");
    CHECK(misread.exit_code == 1);
    CHECK(misread.output.find("residue") != std::string::npos);
}

TEST_CASE("ablate writes both arms and their paired comparison") {
    TempDir dir;
    const auto result = run_cli(
        "ablate --scene composite --redundancy 0.5 --seed 7 --frames 50 "
        "--virtual-clock 33ms --out " +
        dir.str());
    REQUIRE(result.exit_code == 0);
    CHECK(result.output.find("gated:") != std::string::npos);
    CHECK(result.output.find("ungated:") != std::string::npos);
    CHECK(result.output.find("throughput_delta_pct=") != std::string::npos);

    const json doc = load_json(dir.path / "ablation.json");
    CHECK(doc["schema"] == "entrogate.ablation.v1");
    CHECK(doc["gated"]["counters"]["frames_ingested"] == 50);
    CHECK(doc["ungated"]["counters"]["frames_ingested"] == 50);
    CHECK(doc["ungated"]["counters"]["frames_dropped_at_gate"] == 0);
    CHECK(doc.contains("throughput_delta_pct"));
    CHECK(doc["segment_pairs"]["segments"] == 10);

    const std::string gated = read_file(dir.path / "ledger_gated.csv");
    const std::string ungated = read_file(dir.path / "ledger_ungated.csv");
    CHECK(gated.rfind("frame_id,", 0) == 0);
    CHECK(ungated.rfind("frame_id,", 0) == 0);

    // Unpressured identical arms: every segment pairs up, and the paired
    // test lands on the exact zero-difference answer.
    const auto& test = doc["paired_latency_test"];
    REQUIRE_FALSE(test.is_null());
    CHECK(test["n"] == 10);
    CHECK(test["t_statistic"] == 0.0);
    CHECK(test["p_value_two_tailed"] == 1.0);
    CHECK(test["mean_diff"] == 0.0);
}

TEST_CASE("stats reduces one ledger and pairs exactly two") {
    TempDir dir;
    REQUIRE(run_cli("ablate --scene composite --redundancy 0.5 --seed 19 "
                    "--frames 50 --virtual-clock 33ms --out " +
                    dir.str())
                .exit_code == 0);

    const auto one = run_cli("stats " + dir.str() + "/ledger_gated.csv "
                             "--out " +
                             dir.str() + "/one");
    REQUIRE(one.exit_code == 0);
    const json one_doc = load_json(dir.path / "one" / "stats.json");
    CHECK(one_doc["schema"] == "entrogate.stats.v1");
    REQUIRE(one_doc["ledgers"].size() == 1);
    CHECK(one_doc["ledgers"][0]["frames"] == 50);
    CHECK(one_doc["paired_latency_test"].is_null());
    CHECK(one.output.find("\"entrogate.stats.v1\"") != std::string::npos);

    const auto two = run_cli("stats " + dir.str() + "/ledger_gated.csv " +
                             dir.str() + "/ledger_ungated.csv --out " +
                             dir.str() + "/two");
    REQUIRE(two.exit_code == 0);
    const json two_doc = load_json(dir.path / "two" / "stats.json");
    REQUIRE(two_doc["ledgers"].size() == 2);
    CHECK_FALSE(two_doc["paired_latency_test"].is_null());
    CHECK(two_doc["paired_latency_test"]["n"].get<int>() >= 2);
}

TEST_CASE("stats refuses ledgers that cannot be paired") {
    TempDir dir;
    REQUIRE(run_cli("run --scene static --seed 1 --frames 30 "
                    "--virtual-clock 33ms --out " +
                    dir.str() + "/a")
                .exit_code == 0);
    REQUIRE(run_cli("run --scene static --seed 1 --frames 40 "
                    "--virtual-clock 33ms --out " +
                    dir.str() + "/b")
                .exit_code == 0);

    const auto mismatch = run_cli("stats " + dir.str() + "/a/ledger.csv " +
                                  dir.str() + "/b/ledger.csv --out " +
                                  dir.str());
    CHECK(mismatch.exit_code == 1);
    CHECK(mismatch.output.find("pair ledgers from the same stream") !=
          std::string::npos);

    const auto bad = dir.path / "bad.csv";
    write_file(bad, "frame_id,when\n");
    const auto malformed = run_cli("stats " + bad.string());
    CHECK(malformed.exit_code == 1);
    CHECK(malformed.output.find("expected 9") != std::string::npos);

    const auto absent = run_cli("stats " + dir.str() + "/nowhere.csv");
    CHECK(absent.exit_code == 1);

    const auto no_segments = run_cli("stats --segments 0 " + dir.str() +
                                     "/a/ledger.csv");
    CHECK(no_segments.exit_code == 2);
}

TEST_CASE("log verbosity is an environment concern, not a flag") {
    TempDir dir;
    const std::string args = "run --scene static --seed 1 --frames 3 "
                             "--virtual-clock 33ms --out " +
                             dir.str();
    // The debug layer narrates the effective config on stderr.
    const auto debug = run_cli(args, "ENTROGATE_LOG=debug");
    CHECK(debug.exit_code == 0);
    CHECK(debug.output.find("effective config") != std::string::npos);

    // An unrecognized level warns once and proceeds at the default.
    const auto strange = run_cli(args, "ENTROGATE_LOG=chatty");
    CHECK(strange.exit_code == 0);
    CHECK(strange.output.find("not recognized") != std::string::npos);

    const auto quiet = run_cli(args);
    CHECK(quiet.exit_code == 0);
    CHECK(quiet.output.find("effective config") == std::string::npos);
}
