#pragma once

// Shared plumbing for the test binaries: scratch directories, small file
// helpers, a subprocess runner for the CLI, and random-instance generators
// used by the property tests.

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace testutil {

// RAII scratch directory under the system temp root.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        auto base = std::filesystem::temp_directory_path() / "kgrank-test-XXXXXX";
        std::string tmpl = base.string();
        if (!mkdtemp(tmpl.data())) {
            throw std::runtime_error("mkdtemp failed for " + tmpl);
        }
        path = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Path of the built CLI binary / the checked-in fixtures, injected at compile
// time by CMake; the environment variables win so the binaries stay usable
// when relocated.
inline std::string cli_path() {
    if (const char* env = std::getenv("KGRANK_CLI")) return env;
#ifdef KGRANK_CLI_PATH
    return KGRANK_CLI_PATH;
#else
    return "kgrank";
#endif
}

inline std::string fixtures_dir() {
    if (const char* env = std::getenv("KGRANK_FIXTURES")) return env;
#ifdef KGRANK_FIXTURES_DIR
    return KGRANK_FIXTURES_DIR;
#else
    return "fixtures";
#endif
}

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout and stderr interleaved
};

inline std::string shell_quote(const std::string& s) {
    std::string q = "'";
    for (char c : s) {
        if (c == '\'')
            q += "'\\''";
        else
            q += c;
    }
    q += "'";
    return q;
}

// Run the CLI with the given arguments, capturing combined output.
inline CliResult run_cli(const std::vector<std::string>& args) {
    std::string cmd = shell_quote(cli_path());
    for (const auto& a : args) cmd += " " + shell_quote(a);
    cmd += " 2>&1";

    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed: " + cmd);
    CliResult res;
    std::array<char, 4096> buf;
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
        res.output.append(buf.data(), n);
    }
    int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

// --- random-instance generators --------------------------------------------

inline std::vector<double> random_vec(std::mt19937_64& rng, size_t dim,
                                      double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(dim);
    for (auto& x : v) x = dist(rng);
    return v;
}

// Random lowercase token from a small alphabet so collisions (shared terms
// across documents) actually happen.
inline std::string random_token(std::mt19937_64& rng, int max_len = 4) {
    std::uniform_int_distribution<int> len(1, max_len);
    std::uniform_int_distribution<int> ch('a', 'e');
    std::string t(static_cast<size_t>(len(rng)), 'a');
    for (auto& c : t) c = static_cast<char>(ch(rng));
    return t;
}

inline std::vector<std::string> random_tokens(std::mt19937_64& rng, size_t min_n,
                                              size_t max_n, int max_len = 4) {
    std::uniform_int_distribution<size_t> n(min_n, max_n);
    std::vector<std::string> out(n(rng));
    for (auto& t : out) t = random_token(rng, max_len);
    return out;
}

}  // namespace testutil
