#pragma once

// Runs the built command-line binary through the shell and captures its
// exit code and output streams.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace geomancer::oracle {

inline std::string fixture(const std::string& name)
{
    return std::string(GEOMANCER_TEST_DATA_DIR) + "/fixtures/" + name;
}

inline std::string slurp(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Outcome {
    int code = -1;
    std::string out;
    std::string err;
};

inline Outcome spawn(const std::vector<std::string>& args)
{
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("geomancer_spawn_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    std::string cmd = "'" + std::string(GEOMANCER_CLI_PATH) + "'";
    for (const auto& a : args)
        cmd += " '" + a + "'";
    cmd += " >'" + (dir / "out").string() + "' 2>'" + (dir / "err").string() + "'";
    const int status = std::system(cmd.c_str());
    Outcome o;
    o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    o.out = slurp(dir / "out");
    o.err = slurp(dir / "err");
    fs::remove_all(dir);
    return o;
}

} // namespace geomancer::oracle
