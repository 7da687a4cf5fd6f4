// config.cpp
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

#include "vivet/config.hpp"

#include <fstream>
#include <sstream>

#include "vivet/common.hpp"

namespace vivet {

namespace {

std::string Trim(const std::string &s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> SplitList(const std::string &s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(Trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  std::string last = Trim(cur);
  if (!last.empty() || !out.empty()) out.push_back(last);
  return out;
}

}  // namespace

Config Config::FromFile(const std::string &path) {
  std::ifstream in(path);
  Require(in.good(), "Config: cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return FromString(buf.str());
}

Config Config::FromString(const std::string &text) {
  Config cfg;
  cfg.text_ = text;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      Require(t.back() == ']' && t.size() > 2,
              "Config: bad section header at line " + ToString(lineno));
      section = Trim(t.substr(1, t.size() - 2));
      continue;
    }
    size_t eq = t.find('=');
    Require(eq != std::string::npos,
            "Config: expected key = value at line " + ToString(lineno));
    std::string key = Trim(t.substr(0, eq));
    std::string value = Trim(t.substr(eq + 1));
    Require(!key.empty(), "Config: empty key at line " + ToString(lineno));
    if (!section.empty()) key = section + "." + key;
    cfg.values_[key] = value;
  }
  return cfg;
}

bool Config::Has(const std::string &key) const {
  return values_.find(key) != values_.end();
}

std::string Config::GetString(const std::string &key,
                              const std::string &def) const {
  auto it = values_.find(key);
  return it == values_.end() ? def : it->second;
}

int Config::GetInt(const std::string &key, int def) const {
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  try {
    size_t pos = 0;
    int v = std::stoi(it->second, &pos);
    Require(pos == it->second.size(), "trailing characters");
    return v;
  } catch (const std::exception &) {
    throw Error("Config: " + key + " is not an integer: " + it->second);
  }
}

uint64_t Config::GetU64(const std::string &key, uint64_t def) const {
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  try {
    size_t pos = 0;
    uint64_t v = std::stoull(it->second, &pos);
    Require(pos == it->second.size(), "trailing characters");
    return v;
  } catch (const std::exception &) {
    throw Error("Config: " + key + " is not an unsigned integer: " +
                it->second);
  }
}

double Config::GetDouble(const std::string &key, double def) const {
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  try {
    size_t pos = 0;
    double v = std::stod(it->second, &pos);
    Require(pos == it->second.size(), "trailing characters");
    return v;
  } catch (const std::exception &) {
    throw Error("Config: " + key + " is not a number: " + it->second);
  }
}

bool Config::GetBool(const std::string &key, bool def) const {
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  const std::string &v = it->second;
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error("Config: " + key + " is not a boolean: " + v);
}

std::vector<int> Config::GetIntList(const std::string &key,
                                    const std::vector<int> &def) const {
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  std::vector<int> out;
  for (const std::string &tok : SplitList(it->second)) {
    try {
      out.push_back(std::stoi(tok));
    } catch (const std::exception &) {
      throw Error("Config: " + key + " has a non-integer entry: " + tok);
    }
  }
  return out;
}

std::vector<double> Config::GetDoubleList(const std::string &key,
                                          const std::vector<double> &def) const {
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  std::vector<double> out;
  for (const std::string &tok : SplitList(it->second)) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception &) {
      throw Error("Config: " + key + " has a non-numeric entry: " + tok);
    }
  }
  return out;
}

}  // namespace vivet
