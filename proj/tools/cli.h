// tools/cli.h

// Copyright 2026  The wsid Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef WSID_TOOLS_CLI_H_
#define WSID_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace wsid {

/// Runs the `wsid` command line.  Returns the process exit code:
/// 0 success, 1 usage or configuration error, 2 data error, 3 numeric failure.
int RunCli(const std::vector<std::string> &args, std::ostream &out,
           std::ostream &err);

/// SHA-256 of a file's contents as lowercase hex.
std::string FileSha256(const std::string &path);

}  // namespace wsid

#endif  // WSID_TOOLS_CLI_H_
