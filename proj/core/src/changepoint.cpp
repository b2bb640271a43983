#include "samc/changepoint.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace samc {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // log(2 pi)

// Move-kind probabilities at model size k: blocked directions get 0, the
// boundary sizes push the freed third onto the opposite jump.
double birth_prob(int k, const Hyper& h) {
  if (k >= h.k_max) return 0.0;
  return (k == h.k_min) ? 2.0 / 3.0 : 1.0 / 3.0;
}

double death_prob(int k, const Hyper& h) {
  if (k <= h.k_min) return 0.0;
  return (k == h.k_max) ? 2.0 / 3.0 : 1.0 / 3.0;
}

// log(reverse-kind probability / forward-kind probability) for a birth from
// size k. Each probability is 2/3 at its boundary and 1/3 inside, so the log
// ratio is 0 or +-log 2. Writing it through the same std::log(2.0) constant
// makes the death counterpart below the exact bitwise negation, which is
// what keeps move/reverse-move acceptance ratios summing to zero exactly.
double log_q_ratio_birth(int k, const Hyper& h) {
  const bool rev_boundary = (k + 1 == h.k_max);  // death prob at k + 1
  const bool fwd_boundary = (k == h.k_min);      // birth prob at k
  if (rev_boundary == fwd_boundary) return 0.0;
  return rev_boundary ? std::log(2.0) : -std::log(2.0);
}

double log_q_ratio_death(int k, const Hyper& h) {
  const bool rev_boundary = (k - 1 == h.k_min);  // birth prob at k - 1
  const bool fwd_boundary = (k == h.k_max);      // death prob at k
  if (rev_boundary == fwd_boundary) return 0.0;
  return rev_boundary ? std::log(2.0) : -std::log(2.0);
}

// Size-dependent part of the marginal posterior: per-block prior constants,
// the position-count factorial, the Poisson size prior, and the (k+1)/2
// log(2 pi) from the integrated means.
double size_term(int k, int n, const Hyper& h) {
  const double per_block =
      h.alpha * std::log(h.beta) - std::lgamma(h.alpha) + 0.5 * kLog2Pi;
  return (k + 1) * per_block + std::lgamma(static_cast<double>(n - k)) +
         k * std::log(h.lambda_rate);
}

struct BlockTables {
  const double* lgamma_half;   // lgamma((L-1)/2 + alpha), indexed by block length
  const double* half_log_len;  // 0.5 * log(L), indexed by block length
};

// Sum over blocks of lgamma((L-1)/2 + alpha) - (1/2) log L - ((L-1)/2 +
// alpha) log b, with b = beta + (sum z^2)/2 - (sum z)^2 / (2L). With tables
// the loop is one std::log per block.
double block_terms(const std::vector<int>& positions, const Dataset& data,
                   const Hyper& h, const BlockTables* tables) {
  const int n = data.n();
  const int k = static_cast<int>(positions.size());
  double total = 0.0;
  int prev = 0;
  for (int i = 0; i <= k; ++i) {
    const int end = (i < k) ? positions[static_cast<std::size_t>(i)] : n;
    const int len = end - prev;
    const double s1 = data.block_sum(prev, end);
    const double s2 = data.block_sum_sq(prev, end);
    const double b = h.beta + 0.5 * s2 - s1 * s1 / (2.0 * len);
    const double shape = 0.5 * (len - 1) + h.alpha;
    double lg, hll;
    if (tables) {
      lg = tables->lgamma_half[len];
      hll = tables->half_log_len[len];
    } else {
      lg = std::lgamma(shape);
      hll = 0.5 * std::log(static_cast<double>(len));
    }
    total += lg - hll - shape * std::log(b);
    prev = end;
  }
  return total;
}

}  // namespace

void Hyper::validate(int n) const {
  if (!(alpha > 0.0)) throw std::invalid_argument("Hyper: alpha must be > 0");
  if (!(beta > 0.0)) throw std::invalid_argument("Hyper: beta must be > 0");
  if (!(lambda_rate > 0.0)) throw std::invalid_argument("Hyper: lambda_rate must be > 0");
  if (k_min < 0 || k_min > k_max || k_max > n - 1)
    throw std::invalid_argument("Hyper: need 0 <= k_min <= k_max <= n - 1");
}

void validate_model(const ChangePointModel& model, int n) {
  int prev = 0;
  for (int c : model.positions) {
    if (c <= prev || c > n - 1)
      throw std::invalid_argument("ChangePointModel: positions must be strictly increasing in [1, n-1]");
    prev = c;
  }
}

Dataset::Dataset(std::vector<double> z) : z_(std::move(z)) {
  if (z_.empty()) throw std::invalid_argument("Dataset: empty series");
  pref_.resize(z_.size() + 1, 0.0);
  pref2_.resize(z_.size() + 1, 0.0);
  for (std::size_t i = 0; i < z_.size(); ++i) {
    pref_[i + 1] = pref_[i] + z_[i];
    pref2_[i + 1] = pref2_[i] + z_[i] * z_[i];
  }
}

Dataset Dataset::generate_default(std::uint64_t seed) {
  struct Seg {
    int end;
    double mean, var;
  };
  static constexpr Seg segs[] = {
      {120, -0.5, 1.0}, {210, 0.5, 0.5}, {460, 0.0, 1.5},
      {530, -1.0, 1.0}, {615, 0.5, 2.0}, {710, 1.0, 1.0},
      {800, 0.0, 1.0},  {950, 0.5, 0.5}, {1000, 1.0, 1.0}};
  RngStream rng(seed);
  std::vector<double> z;
  z.reserve(1000);
  int start = 0;
  for (const Seg& s : segs) {
    const double sd = std::sqrt(s.var);
    for (int t = start; t < s.end; ++t) z.push_back(s.mean + sd * rng.normal());
    start = s.end;
  }
  return Dataset(std::move(z));
}

std::vector<int> Dataset::default_true_positions() {
  return {120, 210, 460, 530, 615, 710, 800, 950};
}

Dataset Dataset::read(std::istream& in) {
  std::vector<double> z;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(line.substr(first), &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("Dataset::read: bad line: " + line);
    }
    z.push_back(v);
  }
  return Dataset(std::move(z));
}

void Dataset::write(std::ostream& out, std::uint64_t seed) const {
  out << "# n=" << n() << " seed=" << seed << "\n";
  char buf[64];
  for (double v : z_) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << "\n";
  }
}

double log_marginal_posterior(const ChangePointModel& model, const Dataset& data,
                              const Hyper& hyper) {
  validate_model(model, data.n());
  return size_term(model.k(), data.n(), hyper) +
         block_terms(model.positions, data, hyper, nullptr);
}

double log_joint_full(const ChangePointModel& model,
                      const std::vector<std::pair<double, double>>& block_params,
                      const Dataset& data, const Hyper& hyper) {
  const int n = data.n();
  validate_model(model, n);
  const int k = model.k();
  if (block_params.size() != static_cast<std::size_t>(k + 1))
    throw std::invalid_argument("log_joint_full: need one (mean, variance) pair per block");

  double total = k * std::log(hyper.lambda_rate) +
                 std::lgamma(static_cast<double>(n - k));
  int prev = 0;
  for (int i = 0; i <= k; ++i) {
    const int end = (i < k) ? model.positions[static_cast<std::size_t>(i)] : n;
    const int len = end - prev;
    const auto [mu, var] = block_params[static_cast<std::size_t>(i)];
    if (!(var > 0.0)) throw std::invalid_argument("log_joint_full: variances must be > 0");
    const double s1 = data.block_sum(prev, end);
    const double s2 = data.block_sum_sq(prev, end);
    const double ss = s2 - 2.0 * mu * s1 + len * mu * mu;  // sum (z - mu)^2
    total += -0.5 * len * (kLog2Pi + std::log(var)) - ss / (2.0 * var);
    // Gamma(alpha, beta) prior on the precision, written in variance form.
    total += hyper.alpha * std::log(hyper.beta) - std::lgamma(hyper.alpha) -
             (hyper.alpha - 1.0) * std::log(var) - hyper.beta / var;
    prev = end;
  }
  return total;
}

MoveKind choose_move(int k, const Hyper& hyper, RngStream& rng) {
  const double pb = birth_prob(k, hyper);
  const double pd = death_prob(k, hyper);
  const double u = rng.uniform();
  if (u < pb) return MoveKind::birth;
  if (u < pb + pd) return MoveKind::death;
  return MoveKind::simultaneous;
}

std::optional<std::pair<ChangePointModel, MoveMeta>> propose_move(
    const ChangePointModel& current, MoveKind kind, int n, RngStream& rng) {
  const int k = current.k();
  const auto& pos = current.positions;

  if (kind == MoveKind::birth) {
    // Pick one of the k + 1 gaps, then a free slot strictly inside it.
    const int g = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(k) + 1));
    const int left = (g == 0) ? 0 : pos[static_cast<std::size_t>(g - 1)];
    const int right = (g == k) ? n : pos[static_cast<std::size_t>(g)];
    const int width = right - left - 1;
    if (width <= 0) return std::nullopt;
    const int v = left + 1 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(width)));
    ChangePointModel next = current;
    next.positions.insert(next.positions.begin() + g, v);
    return std::make_pair(std::move(next), MoveMeta{MoveKind::birth, width});
  }

  if (kind == MoveKind::death) {
    if (k == 0) return std::nullopt;
    const int j = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(k)));
    const int left = (j == 0) ? 0 : pos[static_cast<std::size_t>(j - 1)];
    const int right = (j == k - 1) ? n : pos[static_cast<std::size_t>(j + 1)];
    ChangePointModel next = current;
    next.positions.erase(next.positions.begin() + j);
    // gap_width is the merged gap a rebirth of this point would draw from.
    return std::make_pair(std::move(next), MoveMeta{MoveKind::death, right - left - 1});
  }

  // simultaneous: move one point to another free slot between its neighbors
  if (k == 0) return std::nullopt;
  const int j = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(k)));
  const int left = (j == 0) ? 0 : pos[static_cast<std::size_t>(j - 1)];
  const int right = (j == k - 1) ? n : pos[static_cast<std::size_t>(j + 1)];
  const int slots = right - left - 2;  // slots in the merged gap minus the point itself
  if (slots <= 0) return std::nullopt;
  int v = left + 1 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(slots)));
  if (v >= pos[static_cast<std::size_t>(j)]) ++v;  // skip over the current position
  ChangePointModel next = current;
  next.positions[static_cast<std::size_t>(j)] = v;
  return std::make_pair(std::move(next), MoveMeta{MoveKind::simultaneous, 0});
}

double accept_log_ratio(const MoveMeta& meta, const ChangePointModel& current,
                        const ChangePointModel& proposed, const ThetaVector& theta,
                        const Dataset& data, const Hyper& hyper) {
  const int k = current.k();
  const auto theta_at = [&](int kk) -> double {
    if (theta.empty()) return 0.0;
    const int idx = kk - hyper.k_min;
    if (idx < 0 || idx >= static_cast<int>(theta.size()))
      throw std::invalid_argument("accept_log_ratio: model size outside the theta range");
    return theta[static_cast<std::size_t>(idx)];
  };

  double theta_term = 0.0, log_q = 0.0, width_term = 0.0;
  switch (meta.kind) {
    case MoveKind::birth:
      if (proposed.k() != k + 1) throw std::invalid_argument("accept_log_ratio: birth must add one point");
      theta_term = theta_at(k) - theta_at(k + 1);
      log_q = log_q_ratio_birth(k, hyper);
      width_term = std::log(static_cast<double>(meta.gap_width));
      break;
    case MoveKind::death:
      if (proposed.k() != k - 1) throw std::invalid_argument("accept_log_ratio: death must remove one point");
      theta_term = theta_at(k) - theta_at(k - 1);
      log_q = log_q_ratio_death(k, hyper);
      width_term = -std::log(static_cast<double>(meta.gap_width));
      break;
    case MoveKind::simultaneous:
      if (proposed.k() != k) throw std::invalid_argument("accept_log_ratio: jitter must keep the size");
      break;
  }

  const double dlp = log_marginal_posterior(proposed, data, hyper) -
                     log_marginal_posterior(current, data, hyper);
  // Term order matters: each term of the reversed move is the exact
  // negation, so this sum and the reversed sum cancel bit for bit.
  return theta_term + dlp + log_q + width_term;
}

std::vector<double> enumerate_exact_posterior(const Dataset& data, const Hyper& hyper) {
  const int n = data.n();
  if (n < 2 || n > 16)
    throw std::invalid_argument("enumerate_exact_posterior: need 2 <= n <= 16");
  hyper.validate(n);

  const double neg_inf = -std::numeric_limits<double>::infinity();
  std::vector<double> lse_max(static_cast<std::size_t>(n), neg_inf);
  std::vector<double> lse_sum(static_cast<std::size_t>(n), 0.0);

  const std::uint32_t total = 1u << (n - 1);
  ChangePointModel model;
  for (std::uint32_t mask = 0; mask < total; ++mask) {
    model.positions.clear();
    for (int b = 0; b < n - 1; ++b)
      if ((mask >> b) & 1u) model.positions.push_back(b + 1);
    const auto k = static_cast<std::size_t>(std::popcount(mask));
    const double lp = log_marginal_posterior(model, data, hyper);
    if (lp <= lse_max[k]) {
      lse_sum[k] += std::exp(lp - lse_max[k]);
    } else {
      lse_sum[k] = lse_sum[k] * std::exp(lse_max[k] - lp) + 1.0;
      lse_max[k] = lp;
    }
  }

  std::vector<double> log_mass(static_cast<std::size_t>(n));
  double all_max = neg_inf;
  for (int k = 0; k < n; ++k) {
    log_mass[k] = lse_max[k] == neg_inf ? neg_inf : lse_max[k] + std::log(lse_sum[k]);
    all_max = std::max(all_max, log_mass[k]);
  }
  double norm = 0.0;
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < n; ++k) {
    if (log_mass[k] != neg_inf) out[k] = std::exp(log_mass[k] - all_max);
    norm += out[k];
  }
  for (double& p : out) p /= norm;
  return out;
}

ChangePointTarget::ChangePointTarget(Dataset data, Hyper hyper)
    : data_(std::move(data)), hyper_(hyper) {
  hyper_.validate(data_.n());
  const int n = data_.n();
  lgamma_half_.resize(static_cast<std::size_t>(n) + 1, 0.0);
  half_log_len_.resize(static_cast<std::size_t>(n) + 1, 0.0);
  for (int len = 1; len <= n; ++len) {
    lgamma_half_[len] = std::lgamma(0.5 * (len - 1) + hyper_.alpha);
    half_log_len_[len] = 0.5 * std::log(static_cast<double>(len));
  }
  a_term_.resize(region_count());
  for (int k = hyper_.k_min; k <= hyper_.k_max; ++k)
    a_term_[static_cast<std::size_t>(k - hyper_.k_min)] = size_term(k, n, hyper_);
}

double ChangePointTarget::log_psi(const State& s) const {
  const int idx = s.k() - hyper_.k_min;
  if (idx < 0 || idx >= static_cast<int>(a_term_.size()))
    throw std::invalid_argument("ChangePointTarget: model size outside [k_min, k_max]");
  const BlockTables tables{lgamma_half_.data(), half_log_len_.data()};
  return a_term_[static_cast<std::size_t>(idx)] +
         block_terms(s.positions, data_, hyper_, &tables);
}

ChangePointTarget::State ChangePointTarget::initial_state(RngStream& rng) const {
  std::vector<int> pos;
  while (static_cast<int>(pos.size()) < hyper_.k_min) {
    const int c = 1 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(data_.n() - 1)));
    if (std::find(pos.begin(), pos.end(), c) == pos.end()) pos.push_back(c);
  }
  std::sort(pos.begin(), pos.end());
  return ChangePointModel{std::move(pos)};
}

std::optional<Proposal<ChangePointTarget::State>> ChangePointTarget::propose(
    const State& s, RngStream& rng) const {
  const int k = s.k();
  const MoveKind kind = choose_move(k, hyper_, rng);
  auto mv = propose_move(s, kind, data_.n(), rng);
  if (!mv) return std::nullopt;
  double lr = 0.0;
  if (kind == MoveKind::birth)
    lr = log_q_ratio_birth(k, hyper_) + std::log(static_cast<double>(mv->second.gap_width));
  else if (kind == MoveKind::death)
    lr = log_q_ratio_death(k, hyper_) - std::log(static_cast<double>(mv->second.gap_width));
  return Proposal<State>{std::move(mv->first), lr};
}

}  // namespace samc
