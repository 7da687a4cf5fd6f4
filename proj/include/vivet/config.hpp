// vivet/config.hpp
//
// Copyright 2026  The vivet authors
//
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
//
// INI-style experiment configuration: "[section]" headers and "key = value"
// lines; keys are addressed as "section.key".  Lines whose first nonblank
// character is '#' are comments; values are taken verbatim otherwise.

#ifndef VIVET_CONFIG_HPP_
#define VIVET_CONFIG_HPP_

#include <map>
#include <string>
#include <vector>

namespace vivet {

class Config {
 public:
  static Config FromFile(const std::string &path);
  static Config FromString(const std::string &text);

  bool Has(const std::string &key) const;
  std::string GetString(const std::string &key, const std::string &def) const;
  int GetInt(const std::string &key, int def) const;
  uint64_t GetU64(const std::string &key, uint64_t def) const;
  double GetDouble(const std::string &key, double def) const;
  bool GetBool(const std::string &key, bool def) const;
  std::vector<int> GetIntList(const std::string &key,
                              const std::vector<int> &def) const;
  std::vector<double> GetDoubleList(const std::string &key,
                                    const std::vector<double> &def) const;

  const std::map<std::string, std::string> &Raw() const { return values_; }
  const std::string &Text() const { return text_; }  // verbatim source

 private:
  std::map<std::string, std::string> values_;
  std::string text_;
};

}  // namespace vivet

#endif  // VIVET_CONFIG_HPP_
