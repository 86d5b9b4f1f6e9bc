// Copyright 2026 The Laconic Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except in compliance
// with the License. You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under the License.

#pragma once

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace laconic::test {

inline std::string
cli_path() {
    const char* env = std::getenv("LACONIC_CLI");
    if (env != nullptr && *env != '\0') {
        return env;
    }
    return LACONIC_CLI_PATH;
}

struct CmdResult {
    int status = -1;
    std::string out;
    std::string err;
};

inline std::string
slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void
spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
}

class TempDir {
 public:
    TempDir() {
        char tmpl[] = "/tmp/laconic_test_XXXXXX";
        if (mkdtemp(tmpl) == nullptr) {
            throw std::runtime_error("mkdtemp failed");
        }
        path_ = tmpl;
    }

    std::string
    file(const std::string& name) const {
        return path_ + "/" + name;
    }

    const std::string&
    path() const {
        return path_;
    }

 private:
    std::string path_;
};

inline CmdResult
run_cli(const TempDir& dir, const std::string& args, const std::string& env_prefix = "") {
    const auto out_path = dir.file("cmd.out");
    const auto err_path = dir.file("cmd.err");
    const auto cmd = env_prefix + cli_path() + " " + args + " >" + out_path + " 2>" + err_path;
    const int raw = std::system(cmd.c_str());
    CmdResult r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    return r;
}

}  // namespace laconic::test
