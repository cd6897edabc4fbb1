#pragma once

// Test-only reference computations. Nothing here calls into the code paths
// it is used to check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

namespace chordlab::oracle {

// --- pitch sets -----------------------------------------------------------

inline const std::map<std::string, std::vector<int>>& quality_steps() {
  static const std::map<std::string, std::vector<int>> table = {
      {"maj", {0, 4, 7}},      {"min", {0, 3, 7}},      {"dim", {0, 3, 6}},
      {"aug", {0, 4, 8}},      {"maj6", {0, 4, 7, 9}},  {"min6", {0, 3, 7, 9}},
      {"maj7", {0, 4, 7, 11}}, {"minmaj7", {0, 3, 7, 11}}, {"min7", {0, 3, 7, 10}},
      {"7", {0, 4, 7, 10}},    {"dim7", {0, 3, 6, 9}},  {"hdim7", {0, 3, 6, 10}},
      {"sus2", {0, 2, 7}},     {"sus4", {0, 5, 7}}};
  return table;
}

inline std::set<int> pitch_set(int root, const std::string& quality) {
  std::set<int> out;
  for (int s : quality_steps().at(quality)) out.insert((root + s) % 12);
  return out;
}

inline int symmetric_difference_size(const std::set<int>& a, const std::set<int>& b) {
  int n = 0;
  for (int x : a) n += b.count(x) ? 0 : 1;
  for (int x : b) n += a.count(x) ? 0 : 1;
  return n;
}

// --- reduction decision table ---------------------------------------------

// quality -> {A1 image, A0 image}; "N" when there is none.
inline const std::map<std::string, std::pair<std::string, std::string>>& decision_table() {
  static const std::map<std::string, std::pair<std::string, std::string>> table = {
      {"maj", {"maj", "maj"}},   {"min", {"min", "min"}},     {"dim", {"dim", "N"}},
      {"aug", {"N", "N"}},       {"maj6", {"maj", "maj"}},    {"min6", {"min", "min"}},
      {"maj7", {"maj7", "maj"}}, {"minmaj7", {"min", "min"}}, {"min7", {"min7", "min"}},
      {"7", {"7", "maj"}},       {"dim7", {"dim", "N"}},      {"hdim7", {"dim", "N"}},
      {"sus2", {"N", "N"}},      {"sus4", {"N", "N"}}};
  return table;
}

// --- Tonnetz ---------------------------------------------------------------

// Triads as pitch sets; node 2r is r:maj and 2r+1 is r:min. Two triads are
// neighbours iff they share exactly two pitch classes.
inline std::vector<std::vector<int>> triad_distances() {
  std::vector<std::set<int>> triads;
  for (int r = 0; r < 12; ++r) {
    triads.push_back(pitch_set(r, "maj"));
    triads.push_back(pitch_set(r, "min"));
  }
  auto shared = [&](int a, int b) {
    int n = 0;
    for (int x : triads[a]) n += triads[b].count(x) ? 1 : 0;
    return n;
  };
  std::vector<std::vector<int>> dist(24, std::vector<int>(24, -1));
  for (int s = 0; s < 24; ++s) {
    dist[s][s] = 0;
    std::deque<int> q{s};
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      for (int v = 0; v < 24; ++v) {
        if (v != u && shared(u, v) == 2 && dist[s][v] < 0) {
          dist[s][v] = dist[s][u] + 1;
          q.push_back(v);
        }
      }
    }
  }
  return dist;
}

// --- convolution -------------------------------------------------------------

// Direct evaluation of sum_r sum_s A[r][s] B[i-r][j-s] over the full output.
inline std::vector<std::vector<double>> convolve(const std::vector<std::vector<double>>& a,
                                                 const std::vector<std::vector<double>>& b) {
  const int t = static_cast<int>(a.size()), f = static_cast<int>(a[0].size());
  const int u = static_cast<int>(b.size()), v = static_cast<int>(b[0].size());
  std::vector<std::vector<double>> out(t + u - 1, std::vector<double>(f + v - 1, 0.0));
  for (int i = 0; i < t + u - 1; ++i) {
    for (int j = 0; j < f + v - 1; ++j) {
      double acc = 0.0;
      for (int r = 0; r < t; ++r) {
        for (int s = 0; s < f; ++s) {
          const int bi = i - r, bj = j - s;
          if (bi >= 0 && bi < u && bj >= 0 && bj < v) acc += a[r][s] * b[bi][bj];
        }
      }
      out[i][j] = acc;
    }
  }
  return out;
}

// --- finite differences -------------------------------------------------------

inline std::vector<double> central_differences(const std::function<double(std::vector<double>&)>& f,
                                               std::vector<double> x, double step = 1e-5) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + step;
    const double up = f(x);
    x[i] = keep - step;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2.0 * step);
  }
  return g;
}

// ||a - b|| / max(||a||, ||b||, floor).
inline double relative_error(const std::vector<double>& a, const std::vector<double>& b,
                             double floor = 1e-8) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), floor});
}

// --- grammar ------------------------------------------------------------------

struct ParsedShape {
  int root = -1;  // -1 for N
  std::string quality;
  std::vector<std::string> extensions;
  std::optional<std::string> bass;
};

// Regex reading of the accepted label grammar; nullopt if it does not match.
inline std::optional<ParsedShape> grammar_parse(const std::string& text) {
  if (text == "N") return ParsedShape{};
  static const std::regex re(
      R"(^([A-G])([#b]*)(?::([A-Za-z0-9]+)(?:\((\*?[#b]*[0-9]+(?:,\*?[#b]*[0-9]+)*)\))?)?(?:/([#b]*[0-9]+))?$)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) return std::nullopt;
  static const std::map<char, int> naturals = {{'C', 0}, {'D', 2}, {'E', 4}, {'F', 5},
                                               {'G', 7}, {'A', 9}, {'B', 11}};
  int root = naturals.at(m[1].str()[0]);
  for (char c : m[2].str()) root += c == '#' ? 1 : -1;
  ParsedShape out;
  out.root = ((root % 12) + 12) % 12;
  out.quality = m[3].matched ? m[3].str() : "maj";
  if (m[4].matched) {
    std::string list = m[4].str();
    std::size_t pos = 0;
    while (true) {
      auto comma = list.find(',', pos);
      out.extensions.push_back(list.substr(pos, comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  if (m[5].matched) out.bass = m[5].str();
  return out;
}

}  // namespace chordlab::oracle
