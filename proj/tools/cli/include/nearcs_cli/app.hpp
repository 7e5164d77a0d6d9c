// SPDX-License-Identifier: Apache-2.0
//
// nearcs - side-information-assisted channel estimation for dual-band XL-MIMO
// Copyright (C) 2026 The nearcs authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
#ifndef NEARCS_CLI_APP_HPP
#define NEARCS_CLI_APP_HPP

#include "nearcs_cli/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace nearcs::cli
{

const std::vector<std::string> &simulate_names();
const std::vector<std::string> &theory_names();

// Committed defaults of each experiment (the files under configs/ hold the same values).
CliConfig simulate_preset(const std::string &name);
// Defaults for a theory subcommand; `regime` selects the optimal-prior scenario.
CliConfig theory_preset(const std::string &name, const std::string &regime = "single-tap");

struct RunOutputs
{
    std::string csv_path;
    std::string manifest_path;
};

// Writes <out_dir>/<name>.csv and <out_dir>/<name>.manifest; prints a summary to `log`.
RunOutputs run_simulate(const CliConfig &cfg, const std::string &name, const std::string &out_dir, bool timing,
                        std::ostream &log);
RunOutputs run_theory(const CliConfig &cfg, const std::string &name, const std::string &out_dir, std::ostream &log);
// Re-executes the command recorded in a manifest.
RunOutputs rerun_manifest(const std::string &manifest_path, const std::string &out_dir, std::ostream &log);

// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace nearcs::cli

#endif
