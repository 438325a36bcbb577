// Copyright 2025 The cobra Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cobra/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "cobra/flow.hpp"

namespace cobra {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    // trim surrounding whitespace
    std::size_t b = cell.find_first_not_of(" \t\r");
    std::size_t e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

[[noreturn]] void csv_error(const std::string& path, int line,
                            const std::string& what) {
  throw std::invalid_argument(path + ":" + std::to_string(line) + ": " + what);
}

// Deterministic uniform integer in [0, bound) from a mt19937_64 stream;
// rejection sampling keeps the draw sequence library-independent.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % bound;
}

}  // namespace

RawDataset load_similarity_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  RawDataset ds;
  std::string line;
  int lineno = 0;
  std::vector<std::vector<Score>> rows;
  std::unordered_set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto cells = split_csv_line(line);
    if (ds.paper_ids.empty()) {
      if (cells.size() < 2 || cells[0] != "reviewer_id") {
        csv_error(path, lineno, "expected header 'reviewer_id,<paper ids...>'");
      }
      for (std::size_t c = 1; c < cells.size(); ++c) {
        if (cells[c].empty()) csv_error(path, lineno, "empty paper id");
        if (!seen.insert(cells[c]).second) {
          csv_error(path, lineno, "duplicate paper id '" + cells[c] + "'");
        }
        ds.paper_ids.push_back(cells[c]);
      }
      seen.clear();
      continue;
    }
    if (cells.size() != ds.paper_ids.size() + 1) {
      csv_error(path, lineno, "row has " + std::to_string(cells.size() - 1) +
                                  " cells, header has " +
                                  std::to_string(ds.paper_ids.size()));
    }
    if (cells[0].empty()) csv_error(path, lineno, "empty reviewer id");
    if (!seen.insert(cells[0]).second) {
      csv_error(path, lineno, "duplicate reviewer id '" + cells[0] + "'");
    }
    ds.reviewer_ids.push_back(cells[0]);
    std::vector<Score> row(ds.paper_ids.size());
    for (std::size_t c = 1; c < cells.size(); ++c) {
      Score v;
      if (!parse_score(cells[c], &v)) {
        csv_error(path, lineno, "cell for paper '" + ds.paper_ids[c - 1] +
                                    "' is not a non-negative number: '" +
                                    cells[c] + "'");
      }
      row[c - 1] = v;
    }
    rows.push_back(std::move(row));
  }
  if (ds.paper_ids.empty() || rows.empty()) {
    throw std::invalid_argument(path + ": no data rows");
  }
  ds.scores = ScoreMatrix(static_cast<int>(rows.size()),
                          static_cast<int>(ds.paper_ids.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      ds.scores.at(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
    }
  }
  return ds;
}

void load_conflicts_csv(const std::string& path, RawDataset* ds) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::string line;
  int lineno = 0;
  bool have_header = false;
  std::vector<std::vector<char>> rows;
  std::size_t next_row = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto cells = split_csv_line(line);
    if (!have_header) {
      if (cells.size() != ds->paper_ids.size() + 1) {
        csv_error(path, lineno, "conflict header does not match similarity shape");
      }
      for (std::size_t c = 1; c < cells.size(); ++c) {
        if (cells[c] != ds->paper_ids[c - 1]) {
          csv_error(path, lineno, "paper id mismatch at column " + std::to_string(c));
        }
      }
      have_header = true;
      continue;
    }
    if (next_row >= ds->reviewer_ids.size()) {
      csv_error(path, lineno, "more rows than the similarity file");
    }
    if (cells.size() != ds->paper_ids.size() + 1 ||
        cells[0] != ds->reviewer_ids[next_row]) {
      csv_error(path, lineno, "row does not match similarity file order");
    }
    std::vector<char> row(ds->paper_ids.size());
    for (std::size_t c = 1; c < cells.size(); ++c) {
      if (cells[c] != "0" && cells[c] != "1") {
        csv_error(path, lineno, "conflict cells must be 0 or 1");
      }
      row[c - 1] = cells[c] == "1" ? 1 : 0;
    }
    rows.push_back(std::move(row));
    ++next_row;
  }
  if (next_row != ds->reviewer_ids.size()) {
    throw std::invalid_argument(path + ": fewer rows than the similarity file");
  }
  ds->conflicts = std::move(rows);
}

std::vector<int> authorship_by_max_matching(const RawDataset& ds) {
  if (!ds.conflicts) {
    throw std::invalid_argument("max-matching authorship requires a conflict matrix");
  }
  const int papers = static_cast<int>(ds.paper_ids.size());
  const int reviewers = static_cast<int>(ds.reviewer_ids.size());
  std::vector<std::vector<int>> adj(papers);
  for (int j = 0; j < papers; ++j) {
    for (int r = 0; r < reviewers; ++r) {
      if ((*ds.conflicts)[r][j]) adj[j].push_back(r);
    }
  }
  std::vector<int> match_of_reviewer;
  max_bipartite_matching(adj, reviewers, &match_of_reviewer);
  std::vector<int> author(papers, -1);
  for (int r = 0; r < reviewers; ++r) {
    if (match_of_reviewer[r] >= 0) author[match_of_reviewer[r]] = r;
  }
  return author;
}

std::vector<int> authorship_by_greedy(const RawDataset& ds) {
  const int papers = static_cast<int>(ds.paper_ids.size());
  const int reviewers = static_cast<int>(ds.reviewer_ids.size());
  std::vector<int> author(papers, -1);
  std::vector<char> taken(reviewers, 0);
  for (int j = 0; j < papers; ++j) {
    int best = -1;
    Score best_score = -1;
    for (int r = 0; r < reviewers; ++r) {
      if (ds.scores.at(r, j) > best_score) {
        best_score = ds.scores.at(r, j);
        best = r;
      }
    }
    if (best >= 0 && !taken[best]) {
      taken[best] = 1;
      author[j] = best;
    }
  }
  return author;
}

RawDataset normalize_scores(RawDataset ds) {
  Score max_score = 0;
  for (int r = 0; r < ds.scores.reviewers(); ++r) {
    for (int j = 0; j < ds.scores.papers(); ++j) {
      max_score = std::max(max_score, ds.scores.at(r, j));
    }
  }
  if (max_score == 0) {
    throw std::invalid_argument("cannot normalize an all-zero score matrix");
  }
  for (int r = 0; r < ds.scores.reviewers(); ++r) {
    for (int j = 0; j < ds.scores.papers(); ++j) {
      __int128 scaled = static_cast<__int128>(ds.scores.at(r, j)) * kScoreOne;
      ds.scores.at(r, j) =
          static_cast<Score>((scaled + max_score / 2) / max_score);
    }
  }
  return ds;
}

void write_authorship_csv(const std::string& path, const RawDataset& ds,
                          const std::vector<int>& author_of_paper) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << "paper_id,author_reviewer_id\n";
  for (std::size_t j = 0; j < author_of_paper.size(); ++j) {
    if (author_of_paper[j] < 0) continue;
    out << ds.paper_ids[j] << "," << ds.reviewer_ids[author_of_paper[j]] << "\n";
  }
}

BuiltInstance build_instance(const RawDataset& ds,
                             const std::vector<int>& author_of_paper, int k_p,
                             int k_a) {
  if (author_of_paper.size() != ds.paper_ids.size()) {
    throw std::invalid_argument("authorship does not match dataset");
  }
  BuiltInstance built;
  std::vector<int> sub_papers;
  for (std::size_t j = 0; j < author_of_paper.size(); ++j) {
    if (author_of_paper[j] >= 0) sub_papers.push_back(static_cast<int>(j));
  }
  const int n = static_cast<int>(sub_papers.size());
  ScoreMatrix scores(n, n);
  std::vector<int> authors(n);
  for (int a = 0; a < n; ++a) {
    int src_reviewer = author_of_paper[sub_papers[a]];
    built.agent_ids.push_back(ds.reviewer_ids[src_reviewer]);
    built.paper_ids.push_back(ds.paper_ids[sub_papers[a]]);
    authors[a] = a;
  }
  for (int r = 0; r < n; ++r) {
    for (int j = 0; j < n; ++j) {
      scores.at(r, j) = ds.scores.at(author_of_paper[sub_papers[r]], sub_papers[j]);
    }
  }
  auto per_paper = rankings_from_scores(scores, authors);
  std::vector<std::vector<std::vector<int>>> rankings(n);
  for (int i = 0; i < n; ++i) rankings[i] = {per_paper[i]};
  built.instance = Instance(k_p, k_a, std::vector<int>(n, 1),
                            std::move(rankings), std::move(scores));
  return built;
}

Subsample subsample_instance(const Instance& full, int size, std::uint64_t seed) {
  for (int i = 0; i < full.agents(); ++i) {
    if (full.submissions(i) != 1) {
      throw std::invalid_argument("subsampling expects single-submission agents");
    }
  }
  if (!full.has_scores()) {
    throw std::invalid_argument("subsampling requires similarity scores");
  }
  if (size < 1 || size > full.papers()) {
    throw std::invalid_argument("subsample size " + std::to_string(size) +
                                " out of range (have " +
                                std::to_string(full.papers()) + " papers)");
  }
  // Partial Fisher-Yates over paper indices.
  std::mt19937_64 rng(seed);
  std::vector<int> pool(full.papers());
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < size; ++i) {
    std::uint64_t j = i + uniform_below(rng, pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  Subsample out;
  out.picked.assign(pool.begin(), pool.begin() + size);
  std::sort(out.picked.begin(), out.picked.end());

  const int n = size;
  ScoreMatrix scores(n, n);
  for (int r = 0; r < n; ++r) {
    for (int j = 0; j < n; ++j) {
      scores.at(r, j) = full.score(out.picked[r], out.picked[j]);
    }
  }
  std::vector<int> authors(n);
  std::iota(authors.begin(), authors.end(), 0);
  auto per_paper = rankings_from_scores(scores, authors);
  std::vector<std::vector<std::vector<int>>> rankings(n);
  for (int i = 0; i < n; ++i) rankings[i] = {per_paper[i]};
  out.instance = Instance(full.k_p(), full.k_a(), std::vector<int>(n, 1),
                          std::move(rankings), std::move(scores));
  return out;
}

Instance load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  int n = -1, k_p = -1, k_a = -1;
  std::vector<int> submissions;
  std::vector<std::vector<std::vector<int>>> rankings;
  std::vector<std::vector<Score>> score_rows;
  std::vector<int> score_row_agent;
  std::string line;
  int lineno = 0;
  auto err = [&](const std::string& what) {
    csv_error(path, lineno, what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (key == "agents") {
      if (!(ls >> n) || n < 0) err("bad agent count");
    } else if (key == "k_p") {
      if (!(ls >> k_p)) err("bad k_p");
    } else if (key == "k_a") {
      if (!(ls >> k_a)) err("bad k_a");
    } else if (key == "submissions") {
      if (n < 0) err("'agents' must come before 'submissions'");
      submissions.resize(n);
      for (int i = 0; i < n; ++i) {
        if (!(ls >> submissions[i])) err("expected " + std::to_string(n) + " counts");
      }
      rankings.assign(n, {});
      for (int i = 0; i < n; ++i) rankings[i].resize(submissions[i]);
    } else if (key == "ranking") {
      if (submissions.empty()) err("'submissions' must come before rankings");
      int agent, sub;
      if (!(ls >> agent >> sub) || agent < 1 || agent > n) err("bad ranking agent");
      if (sub < 1 || sub > submissions[agent - 1]) err("bad submission index");
      std::vector<int> order;
      int r;
      while (ls >> r) {
        if (r < 1 || r > n) err("ranking entry out of range");
        order.push_back(r - 1);
      }
      rankings[agent - 1][sub - 1] = std::move(order);
    } else if (key == "scorerow") {
      int agent;
      if (!(ls >> agent) || agent < 1 || agent > n) err("bad scorerow agent");
      std::vector<Score> row;
      std::string cell;
      while (ls >> cell) {
        Score v;
        if (!parse_score(cell, &v)) err("bad score value '" + cell + "'");
        row.push_back(v);
      }
      score_row_agent.push_back(agent - 1);
      score_rows.push_back(std::move(row));
    } else {
      err("unknown directive '" + key + "'");
    }
  }
  if (n < 0 || k_p < 0 || k_a < 0 || submissions.empty()) {
    throw std::invalid_argument(path + ": missing agents/k_p/k_a/submissions");
  }
  std::optional<ScoreMatrix> scores;
  if (!score_rows.empty()) {
    int m = 0;
    for (int c : submissions) m += c;
    ScoreMatrix sm(n, m);
    std::vector<char> seen(n, 0);
    for (std::size_t r = 0; r < score_rows.size(); ++r) {
      int agent = score_row_agent[r];
      if (seen[agent]) throw std::invalid_argument(path + ": duplicate scorerow");
      seen[agent] = 1;
      if (static_cast<int>(score_rows[r].size()) != m) {
        throw std::invalid_argument(path + ": scorerow needs one value per paper");
      }
      for (int j = 0; j < m; ++j) sm.at(agent, j) = score_rows[r][j];
    }
    for (int i = 0; i < n; ++i) {
      if (!seen[i]) throw std::invalid_argument(path + ": missing scorerow for agent " + std::to_string(i + 1));
    }
    scores = std::move(sm);
  }
  return Instance(k_p, k_a, std::move(submissions), std::move(rankings),
                  std::move(scores));
}

}  // namespace cobra
