#include "fekete/subshift_entropy.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <numeric>
#include <set>
#include <thread>
#include <unordered_map>

#include "fekete/errors.hpp"
#include "fekete/function_registry.hpp"
#include "json.hpp"

namespace fekete {

void SftSpec::validate() const {
  if (alphabet < 2 || alphabet > 255) throw DomainError("alphabet size must be in [2, 255]");
  if (dim < 1) throw DomainError("SFT dimension must be >= 1");
  for (std::size_t p = 0; p < forbidden.size(); ++p) {
    const auto& fp = forbidden[p];
    const std::string where = "forbidden pattern " + std::to_string(p);
    if (fp.offsets.empty()) throw DomainError(where + " is empty");
    if (fp.offsets.size() != fp.symbols.size()) {
      throw DomainError(where + ": offsets and symbols differ in length");
    }
    for (int s : fp.symbols) {
      if (s < 0 || s >= alphabet) throw DomainError(where + ": symbol out of range");
    }
    std::set<std::vector<std::int64_t>> seen;
    for (const auto& o : fp.offsets) {
      if (o.size() != dim) throw DomainError(where + ": offset dimension mismatch");
      if (!seen.insert(o).second) throw DomainError(where + ": repeated offset");
    }
    for (std::size_t i = 0; i < dim; ++i) {
      std::int64_t lo = fp.offsets[0][i];
      std::int64_t hi = lo;
      for (const auto& o : fp.offsets) {
        lo = std::min(lo, o[i]);
        hi = std::max(hi, o[i]);
      }
      if (hi - lo + 1 > max_pattern_side) {
        throw DomainError(where + ": bounding box side exceeds " + std::to_string(max_pattern_side));
      }
    }
  }
}

SftSpec SftSpec::normalized() const {
  validate();
  SftSpec out = *this;
  for (auto& fp : out.forbidden) {
    for (std::size_t i = 0; i < dim; ++i) {
      std::int64_t lo = fp.offsets[0][i];
      for (const auto& o : fp.offsets) lo = std::min(lo, o[i]);
      for (auto& o : fp.offsets) o[i] -= lo;
    }
  }
  return out;
}

SftSpec full_shift(int alphabet, std::size_t dim) {
  SftSpec s{alphabet, dim, {}};
  s.validate();
  return s;
}

SftSpec golden_mean_1d() { return {2, 1, {{{{0}, {1}}, {1, 1}}}}; }

SftSpec hard_square_2d() {
  return {2, 2, {{{{0, 0}, {0, 1}}, {1, 1}}, {{{0, 0}, {1, 0}}, {1, 1}}}};
}

std::vector<std::string> sft_fixture_names() { return {"full_shift", "golden_mean_1d", "hard_square_2d"}; }

SftSpec sft_fixture(const std::string& name) {
  if (name == "full_shift") return full_shift();
  if (name == "golden_mean_1d") return golden_mean_1d();
  if (name == "hard_square_2d") return hard_square_2d();
  throw DomainError("unknown SFT fixture: " + name);
}

SftSpec parse_sft(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("SFT spec: ") + e.what());
  }
  SftSpec s;
  try {
    s.alphabet = j.at("alphabet").get<int>();
    s.dim = j.at("dim").get<std::size_t>();
    for (const auto& fp : j.value("forbidden", nlohmann::json::array())) {
      ForbiddenPattern p;
      p.offsets = fp.at("offsets").get<std::vector<std::vector<std::int64_t>>>();
      p.symbols = fp.at("symbols").get<std::vector<int>>();
      s.forbidden.push_back(std::move(p));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("SFT spec: ") + e.what());
  }
  s.validate();
  return s;
}

std::string serialize_sft(const SftSpec& sft) {
  nlohmann::json j;
  j["alphabet"] = sft.alphabet;
  j["dim"] = sft.dim;
  j["forbidden"] = nlohmann::json::array();
  for (const auto& fp : sft.forbidden) {
    j["forbidden"].push_back({{"offsets", fp.offsets}, {"symbols", fp.symbols}});
  }
  return j.dump() + "\n";
}

SftSpec load_sft(const std::string& name_or_path) {
  const auto names = sft_fixture_names();
  if (std::find(names.begin(), names.end(), name_or_path) != names.end()) {
    return sft_fixture(name_or_path);
  }
  if (!std::filesystem::exists(name_or_path)) {
    throw DomainError("unknown SFT fixture or missing file: " + name_or_path);
  }
  return parse_sft(read_text_file(name_or_path));
}

SftSpec relabeled(const SftSpec& sft, const std::vector<int>& perm) {
  sft.validate();
  if (perm.size() != static_cast<std::size_t>(sft.alphabet)) {
    throw DomainError("permutation size differs from alphabet");
  }
  std::vector<int> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < sft.alphabet; ++i) {
    if (sorted[i] != i) throw DomainError("not a permutation of the alphabet");
  }
  SftSpec out = sft;
  for (auto& fp : out.forbidden) {
    for (auto& s : fp.symbols) s = perm[s];
  }
  return out;
}

std::string to_string(Admissibility) { return "locally_admissible"; }

// ------------------------------------------------------------------ counting

namespace {

/// Checks that fire when a cell is assigned: each entry lists (distance back
/// from the current cell in row-major order, required symbol) for the other
/// cells of one forbidden translate whose last cell is the current one.
struct CellCheck {
  int symbol = 0;  // required at the current cell
  std::vector<std::pair<std::size_t, int>> back;
};

struct CountPlan {
  std::size_t volume = 0;
  std::size_t window = 0;  // max distance back any check reaches
  std::vector<std::vector<CellCheck>> checks;
};

CountPlan make_plan(const SftSpec& sft, const std::vector<std::int64_t>& sides) {
  const std::size_t d = sft.dim;
  CountPlan plan;
  std::vector<std::size_t> stride(d);
  std::size_t volume = 1;
  for (std::size_t i = d; i-- > 0;) {
    stride[i] = volume;
    volume *= static_cast<std::size_t>(sides[i]);
  }
  plan.volume = volume;
  plan.checks.resize(volume);
  for (const auto& fp : sft.forbidden) {
    std::vector<std::int64_t> ext(d, 0);
    for (const auto& o : fp.offsets) {
      for (std::size_t i = 0; i < d; ++i) ext[i] = std::max(ext[i], o[i] + 1);
    }
    std::vector<std::int64_t> room(d);
    bool fits = true;
    for (std::size_t i = 0; i < d; ++i) {
      room[i] = sides[i] - ext[i] + 1;
      fits = fits && room[i] > 0;
    }
    if (!fits) continue;
    std::size_t placements = 1;
    for (auto r : room) placements *= static_cast<std::size_t>(r);
    for (std::size_t c = 0; c < placements; ++c) {
      std::size_t rem = c;
      std::size_t origin = 0;
      for (std::size_t i = d; i-- > 0;) {
        origin += (rem % static_cast<std::size_t>(room[i])) * stride[i];
        rem /= static_cast<std::size_t>(room[i]);
      }
      std::vector<std::pair<std::size_t, int>> cells;
      for (std::size_t k = 0; k < fp.offsets.size(); ++k) {
        std::size_t idx = origin;
        for (std::size_t i = 0; i < d; ++i) idx += static_cast<std::size_t>(fp.offsets[k][i]) * stride[i];
        cells.emplace_back(idx, fp.symbols[k]);
      }
      std::sort(cells.begin(), cells.end());
      const std::size_t last = cells.back().first;
      CellCheck check{cells.back().second, {}};
      for (std::size_t k = 0; k + 1 < cells.size(); ++k) {
        check.back.emplace_back(last - cells[k].first, cells[k].second);
        plan.window = std::max(plan.window, last - cells[k].first);
      }
      plan.checks[last].push_back(std::move(check));
    }
  }
  return plan;
}

/// Frontier key: the symbols of the last `window` cells, oldest first.
using Frontier = std::unordered_map<std::string, BigInt>;

BigInt run_from(const CountPlan& plan, int alphabet, std::size_t start, Frontier frontier,
                std::size_t max_states) {
  for (std::size_t cell = start; cell < plan.volume; ++cell) {
    Frontier next;
    const auto& checks = plan.checks[cell];
    for (auto& [key, count] : frontier) {
      for (int s = 0; s < alphabet; ++s) {
        bool ok = true;
        for (const auto& chk : checks) {
          if (chk.symbol != s) continue;
          bool hit = true;
          for (const auto& [back, sym] : chk.back) {
            if (static_cast<unsigned char>(key[key.size() - back]) != sym) {
              hit = false;
              break;
            }
          }
          if (hit) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        std::string nk = key;
        nk.push_back(static_cast<char>(s));
        if (nk.size() > plan.window) nk.erase(0, nk.size() - plan.window);
        next[nk] += count;
      }
    }
    if (next.size() > max_states) {
      throw CapExceeded("pattern count needs more than " + std::to_string(max_states) +
                        " frontier states");
    }
    frontier = std::move(next);
    if (frontier.empty()) return 0;
  }
  BigInt total = 0;
  for (const auto& [key, count] : frontier) total += count;
  return total;
}

void check_sides(const SftSpec& sft, const std::vector<std::int64_t>& sides, const CountCaps& caps) {
  if (sides.size() != sft.dim) throw DomainError("sides dimension differs from SFT dimension");
  std::size_t volume = 1;
  for (auto n : sides) {
    if (n < 1) throw DomainError("box sides must be >= 1");
    if (static_cast<std::size_t>(n) > caps.max_volume || volume > caps.max_volume / static_cast<std::size_t>(n)) {
      throw CapExceeded("box volume exceeds cap " + std::to_string(caps.max_volume));
    }
    volume *= static_cast<std::size_t>(n);
  }
  if (volume > caps.max_volume) {
    throw CapExceeded("box volume exceeds cap " + std::to_string(caps.max_volume));
  }
}

ExtendedReal log_base(const BigInt& count, int alphabet) {
  if (count == 0) return ExtendedReal::minus_infinity();
  // log of a big integer: split off whole 2^52 chunks to stay in range
  BigInt c = count;
  double shift = 0.0;
  const unsigned bits = static_cast<unsigned>(msb(c)) + 1;
  if (bits > 1000) {
    const unsigned drop = bits - 1000;
    c >>= drop;
    shift = static_cast<double>(drop) * std::log(2.0);
  }
  return (std::log(c.convert_to<double>()) + shift) / std::log(static_cast<double>(alphabet));
}

}  // namespace

PatternCount count_patterns(const SftSpec& sft, const std::vector<std::int64_t>& sides,
                            const CountCaps& caps) {
  const SftSpec norm = sft.normalized();
  check_sides(norm, sides, caps);
  const CountPlan plan = make_plan(norm, sides);

  PatternCount out{sides, 0, Admissibility::locally_admissible};
  if (plan.window == 0) {
    // Only single-cell patterns: each cell is independent.
    std::size_t allowed = static_cast<std::size_t>(norm.alphabet);
    std::set<int> banned;
    for (const auto& fp : norm.forbidden) {
      if (fp.offsets.size() == 1) banned.insert(fp.symbols[0]);
    }
    allowed -= banned.size();
    out.count = boost::multiprecision::pow(BigInt(allowed), static_cast<unsigned>(plan.volume));
    return out;
  }

  // Partition by the symbol of the first cell; parts are summed.
  std::vector<int> firsts;
  for (int s = 0; s < norm.alphabet; ++s) {
    bool ok = true;
    for (const auto& chk : plan.checks[0]) ok = ok && chk.symbol != s;
    if (ok) firsts.push_back(s);
  }
  std::vector<BigInt> parts(firsts.size());
  std::vector<std::exception_ptr> errors(firsts.size());
  auto work = [&](std::size_t i) {
    try {
      Frontier start;
      start[std::string(1, static_cast<char>(firsts[i]))] = 1;
      parts[i] = run_from(plan, norm.alphabet, 1, std::move(start), caps.max_states);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(caps.threads, firsts.size()));
  if (threads == 1) {
    for (std::size_t i = 0; i < firsts.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < firsts.size(); i += threads) work(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (const auto& p : parts) out.count += p;
  return out;
}

LogComplexity log_complexity(const SftSpec& sft, const std::vector<std::int64_t>& sides,
                             const CountCaps& caps) {
  const PatternCount pc = count_patterns(sft, sides, caps);
  return {log_base(pc.count, sft.alphabet), pc.count == 0, pc.count};
}

EntropyBracket entropy_bounds(const SftSpec& sft, std::int64_t max_side, const CountCaps& caps) {
  if (max_side < 1) throw DomainError("max_side must be >= 1");
  EntropyBracket b;
  if (sft.dim == 1) b.exact_1d = transfer_matrix_entropy_1d(sft).to_double();
  for (std::int64_t n = 1; n <= max_side; ++n) {
    const std::vector<std::int64_t> sides(sft.dim, n);
    LogComplexity lc;
    try {
      lc = log_complexity(sft, sides, caps);
    } catch (const CapExceeded& e) {
      b.truncated = true;
      b.truncation_reason = "n=" + std::to_string(n) + ": " + e.what();
      break;
    }
    const double volume = std::pow(static_cast<double>(n), static_cast<double>(sft.dim));
    const ExtendedReal ratio = lc.empty ? ExtendedReal::minus_infinity() : lc.value / volume;
    b.best_upper = min(b.best_upper, ratio);
    b.rows.push_back({sides, lc.count, lc.value, ratio, b.best_upper});
  }
  return b;
}

// ------------------------------------------------------------ 1-D transfer

namespace {

struct Window1d {
  std::size_t memory = 0;  // longest pattern length minus one
  /// Patterns as (symbols by position), positions relative to the pattern start.
  std::vector<std::vector<std::pair<std::size_t, int>>> patterns;
  std::vector<std::size_t> lengths;
};

Window1d window_of(const SftSpec& sft) {
  if (sft.dim != 1) throw DomainError("transfer matrix needs a one-dimensional SFT");
  const SftSpec norm = sft.normalized();
  Window1d w;
  for (const auto& fp : norm.forbidden) {
    std::vector<std::pair<std::size_t, int>> cells;
    std::size_t len = 0;
    for (std::size_t k = 0; k < fp.offsets.size(); ++k) {
      const auto pos = static_cast<std::size_t>(fp.offsets[k][0]);
      cells.emplace_back(pos, fp.symbols[k]);
      len = std::max(len, pos + 1);
    }
    if (len > static_cast<std::size_t>(max_pattern_side)) {
      throw DomainError("forbidden pattern longer than the transfer window");
    }
    w.memory = std::max(w.memory, len - 1);
    w.patterns.push_back(std::move(cells));
    w.lengths.push_back(len);
  }
  return w;
}

/// True if no pattern occurs ending at the last symbol of `word`.
bool tail_ok(const Window1d& w, const std::vector<int>& word) {
  for (std::size_t p = 0; p < w.patterns.size(); ++p) {
    const std::size_t len = w.lengths[p];
    if (word.size() < len) continue;
    const std::size_t start = word.size() - len;
    bool match = true;
    for (const auto& [pos, sym] : w.patterns[p]) {
      if (word[start + pos] != sym) {
        match = false;
        break;
      }
    }
    if (match) return false;
  }
  return true;
}

}  // namespace

BigInt transfer_matrix_count_1d(const SftSpec& sft, std::int64_t n) {
  if (n < 1) throw DomainError("word length must be >= 1");
  const Window1d w = window_of(sft);
  std::map<std::vector<int>, BigInt> states{{{}, 1}};
  for (std::int64_t pos = 0; pos < n; ++pos) {
    std::map<std::vector<int>, BigInt> next;
    for (const auto& [state, count] : states) {
      for (int s = 0; s < sft.alphabet; ++s) {
        std::vector<int> word = state;
        word.push_back(s);
        if (!tail_ok(w, word)) continue;
        if (word.size() > w.memory) word.erase(word.begin(), word.end() - static_cast<std::ptrdiff_t>(w.memory));
        next[word] += count;
      }
    }
    states = std::move(next);
  }
  BigInt total = 0;
  for (const auto& [state, count] : states) total += count;
  return total;
}

double dominant_eigenvalue_1d(const SftSpec& sft) {
  const Window1d w = window_of(sft);
  const auto a = static_cast<std::size_t>(sft.alphabet);
  std::size_t states = 1;
  for (std::size_t i = 0; i < w.memory; ++i) {
    states *= a;
    if (states > 1u << 16) throw CapExceeded("transfer matrix too large");
  }
  auto decode = [&](std::size_t code) {
    std::vector<int> word(w.memory);
    for (std::size_t i = w.memory; i-- > 0;) {
      word[i] = static_cast<int>(code % a);
      code /= a;
    }
    return word;
  };
  // Edges u -> v labelled by the appended symbol; only states that are
  // themselves admissible words take part.
  std::vector<bool> live(states);
  for (std::size_t u = 0; u < states; ++u) {
    const auto word = decode(u);
    bool ok = true;
    std::vector<int> prefix;
    for (int s : word) {
      prefix.push_back(s);
      ok = ok && tail_ok(w, prefix);
    }
    live[u] = ok;
  }
  std::vector<std::vector<std::size_t>> edges(states);
  for (std::size_t u = 0; u < states; ++u) {
    if (!live[u]) continue;
    const auto word = decode(u);
    for (std::size_t s = 0; s < a; ++s) {
      std::vector<int> ext = word;
      ext.push_back(static_cast<int>(s));
      if (!tail_ok(w, ext)) continue;
      const std::size_t v = w.memory == 0 ? 0 : (u * a + s) % states;
      edges[u].push_back(v);
    }
  }
  std::vector<double> x(states, 0.0);
  for (std::size_t u = 0; u < states; ++u) x[u] = live[u] ? 1.0 : 0.0;
  double lambda = 0.0;
  for (int it = 0; it < 200000; ++it) {
    std::vector<double> y = x;  // the identity shift keeps the iteration aperiodic
    for (std::size_t u = 0; u < states; ++u) {
      for (std::size_t v : edges[u]) y[u] += x[v];
    }
    const double norm = *std::max_element(y.begin(), y.end());
    if (norm == 0.0) return 0.0;
    const double prev_norm = *std::max_element(x.begin(), x.end());
    const double next_lambda = norm / prev_norm - 1.0;
    for (auto& v : y) v /= norm;
    x = std::move(y);
    if (it > 10 && std::abs(next_lambda - lambda) <= 1e-15 * std::max(1.0, next_lambda)) {
      lambda = next_lambda;
      break;
    }
    lambda = next_lambda;
  }
  return std::max(lambda, 0.0);
}

ExtendedReal transfer_matrix_entropy_1d(const SftSpec& sft) {
  const double lambda = dominant_eigenvalue_1d(sft);
  // Eigenvalue below one means only finitely many words.
  if (lambda < 1.0 - 1e-9) return ExtendedReal::minus_infinity();
  return std::log(std::max(lambda, 1.0)) / std::log(static_cast<double>(sft.alphabet));
}

// --------------------------------------------------------- submultiplicativity

ViolationReport check_count_submultiplicativity(const SftSpec& sft, std::int64_t side_cap,
                                                const CountCaps& caps) {
  if (side_cap < 1) throw DomainError("side cap must be >= 1");
  const std::size_t d = sft.dim;
  std::map<std::vector<std::int64_t>, BigInt> counts;
  auto count = [&](const std::vector<std::int64_t>& sides) -> const BigInt& {
    auto it = counts.find(sides);
    if (it == counts.end()) it = counts.emplace(sides, count_patterns(sft, sides, caps).count).first;
    return it->second;
  };
  ViolationReport report;
  ViolationReport found;
  std::vector<std::int64_t> box(d, 1);
  while (true) {
    for (std::size_t axis = 0; axis < d; ++axis) {
      for (std::int64_t p = 1; p < box[axis]; ++p) {
        const std::int64_t q = box[axis] - p;
        if (p > q) break;
        auto bp = box;
        auto bq = box;
        bp[axis] = p;
        bq[axis] = q;
        const BigInt& whole = count(box);
        const BigInt rhs = count(bp) * count(bq);
        ++report.checked;
        if (whole > rhs) {
          Violation v;
          v.kind = ViolationKind::componentwise;
          v.axis = axis;
          v.witness = {std::vector<double>(bp.begin(), bp.end()), std::vector<double>(bq.begin(), bq.end())};
          v.lhs = log_base(whole, sft.alphabet).to_double();
          v.rhs = (log_base(count(bp), sft.alphabet) + log_base(count(bq), sft.alphabet)).to_double();
          v.margin = v.lhs - v.rhs;
          found.violations.push_back(std::move(v));
        }
      }
    }
    std::size_t i = d;
    while (i-- > 0) {
      if (++box[i] <= side_cap) break;
      box[i] = 1;
      if (i == 0) {
        report.merge(std::move(found));
        return report;
      }
    }
  }
}

std::vector<BoxRatio> folner_box_ratio(const SftSpec& sft,
                                       const std::vector<std::vector<std::int64_t>>& boxes,
                                       const CountCaps& caps) {
  std::vector<BoxRatio> out;
  for (const auto& box : boxes) {
    const LogComplexity lc = log_complexity(sft, box, caps);
    double volume = 1.0;
    for (auto n : box) volume *= static_cast<double>(n);
    out.push_back({box, lc.count, lc.empty ? ExtendedReal::minus_infinity() : lc.value / volume});
  }
  return out;
}

std::string entropy_rows_to_csv(const EntropyBracket& bracket, std::size_t dim) {
  std::string out;
  for (std::size_t i = 0; i < dim; ++i) out += "n" + std::to_string(i + 1) + ",";
  out += "count,log_complexity,ratio,running_min\n";
  for (const auto& r : bracket.rows) {
    for (auto n : r.sides) out += std::to_string(n) + ",";
    out += r.count.str() + "," + to_string(r.log_complexity) + "," + to_string(r.ratio) + "," +
           to_string(r.running_min) + "\n";
  }
  return out;
}

}  // namespace fekete
