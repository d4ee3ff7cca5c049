#include "bbdd/pulsekit.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bbdd/errors.hpp"

namespace bbdd {

std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::kNone: return "NONE";
    case Protocol::kAsymmetric: return "A";
    case Protocol::kSymmetric: return "S";
    case Protocol::kLongSymmetric: return "LS";
    case Protocol::kRandom: return "R";
    case Protocol::kHybrid: return "H";
  }
  return "?";
}

Protocol parse_protocol(std::string_view name) {
  std::string up(name);
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
  if (up == "NONE") return Protocol::kNone;
  if (up == "A") return Protocol::kAsymmetric;
  if (up == "S") return Protocol::kSymmetric;
  if (up == "LS") return Protocol::kLongSymmetric;
  if (up == "R") return Protocol::kRandom;
  if (up == "H") return Protocol::kHybrid;
  throw InvalidSpec("unknown protocol '" + std::string(name) + "'");
}

bool is_randomized(Protocol p) { return p == Protocol::kRandom || p == Protocol::kHybrid; }

void ProtocolSpec::validate() const {
  if (intervals < 1) throw InvalidSpec("protocol: M must be a positive integer");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidSpec("protocol: dt must be > 0");
  if (!std::isfinite(t0)) throw InvalidSpec("protocol: t0 must be finite");
  if (!(flip_probability >= 0.0 && flip_probability <= 1.0))
    throw InvalidSpec("protocol: flip_probability must lie in [0, 1]");
  if (kind == Protocol::kHybrid && intervals % 2 != 0)
    throw InvalidSpec("protocol: H requires an even number of intervals");
}

std::vector<Sign> chi_from_flips(std::span<const Flip> flips) {
  std::vector<Sign> chi;
  if (flips.size() < 2) return chi;
  chi.reserve(flips.size() - 1);
  Sign s = 1;
  for (std::size_t j = 0; j + 1 < flips.size(); ++j) {
    if (flips[j]) s = -s;
    chi.push_back(s);
  }
  return chi;
}

ControlRealization::ControlRealization(std::vector<double> boundaries, std::vector<Flip> flips)
    : boundaries_(std::move(boundaries)), flips_(std::move(flips)) {
  if (boundaries_.size() < 2) throw InvalidSpec("realization: need at least one interval");
  if (flips_.size() != boundaries_.size())
    throw InvalidSpec("realization: need exactly one flip flag per boundary");
  for (std::size_t j = 1; j < boundaries_.size(); ++j) {
    if (!(boundaries_[j] > boundaries_[j - 1]))
      throw InvalidSpec("realization: boundaries must be strictly increasing");
  }
  for (auto& f : flips_) {
    if (f > 1) throw InvalidSpec("realization: flip flags must be 0 or 1");
  }
  chi_ = chi_from_flips(flips_);
}

ControlRealization ControlRealization::uniform(double t0, double dt, std::vector<Flip> flips) {
  std::vector<double> b(flips.size());
  for (std::size_t j = 0; j < b.size(); ++j) b[j] = t0 + static_cast<double>(j) * dt;
  return ControlRealization(std::move(b), std::move(flips));
}

std::optional<double> ControlRealization::uniform_dt() const {
  const double dt = interval_length(0);
  for (int j = 1; j < intervals(); ++j) {
    if (std::abs(interval_length(j) - dt) > 1e-12 * std::max(1.0, std::abs(dt)) + 1e-12 * std::abs(boundaries_[j]))
      return std::nullopt;
  }
  return dt;
}

Eigen::VectorXd ControlRealization::chi_vector() const {
  Eigen::VectorXd v(chi_.size());
  for (std::size_t j = 0; j < chi_.size(); ++j) v(static_cast<Eigen::Index>(j)) = chi_[j];
  return v;
}

namespace {

std::vector<double> uniform_grid(const ProtocolSpec& s) {
  std::vector<double> b(static_cast<std::size_t>(s.intervals) + 1);
  for (int j = 0; j <= s.intervals; ++j) b[j] = s.t0 + j * s.dt;
  return b;
}

// lambda list of an H realization from its cycle choices (0 = A1, 1 = A2).
std::vector<Flip> hybrid_flips(int intervals, auto&& cycle_choice) {
  const int cycles = intervals / 2;
  std::vector<Flip> flips(static_cast<std::size_t>(intervals) + 1, 0);
  int prev = 0;
  for (int k = 0; k < cycles; ++k) {
    const int a = cycle_choice(k);
    // A2 opens with a pulse; A1 of the previous cycle closed with one.
    flips[2 * k] = static_cast<Flip>(k == 0 ? a : (a ^ (1 - prev)));
    flips[2 * k + 1] = 1;
    prev = a;
  }
  flips[intervals] = static_cast<Flip>(1 - prev);
  return flips;
}

}  // namespace

ControlRealization deterministic_realization(const ProtocolSpec& spec) {
  spec.validate();
  const int m = spec.intervals;
  switch (spec.kind) {
    case Protocol::kNone:
      return ControlRealization(uniform_grid(spec), std::vector<Flip>(m + 1, 0));
    case Protocol::kAsymmetric: {
      std::vector<Flip> f(m + 1, 1);
      f[0] = 0;
      return ControlRealization(uniform_grid(spec), std::move(f));
    }
    case Protocol::kLongSymmetric: {
      std::vector<Flip> f(m + 1, 0);
      for (int j = 1; j <= m; j += 2) f[j] = 1;
      return ControlRealization(uniform_grid(spec), std::move(f));
    }
    case Protocol::kSymmetric: {
      // Pulses at t0 + (k - 1/2) dt, k = 1..M; half intervals at both ends.
      std::vector<double> b;
      b.reserve(m + 2);
      b.push_back(spec.t0);
      for (int k = 1; k <= m; ++k) b.push_back(spec.t0 + (k - 0.5) * spec.dt);
      b.push_back(spec.horizon());
      std::vector<Flip> f{0};
      f.insert(f.end(), static_cast<std::size_t>(m), Flip{1});
      f.push_back(0);
      return ControlRealization(std::move(b), std::move(f));
    }
    case Protocol::kRandom:
    case Protocol::kHybrid:
      break;
  }
  throw InvalidSpec("protocol " + std::string(to_string(spec.kind)) + " is randomized");
}

ControlRealization sample_realization(const ProtocolSpec& spec, Rng& rng) {
  const int m = spec.intervals;
  if (spec.kind == Protocol::kRandom) {
    std::bernoulli_distribution flip(spec.flip_probability);
    std::vector<Flip> f(m + 1);
    for (auto& x : f) x = flip(rng) ? 1 : 0;
    return ControlRealization(uniform_grid(spec), std::move(f));
  }
  if (spec.kind == Protocol::kHybrid) {
    std::uniform_int_distribution<int> coin(0, 1);
    std::vector<int> choice(m / 2);
    for (auto& c : choice) c = coin(rng);
    return ControlRealization(uniform_grid(spec), hybrid_flips(m, [&](int k) { return choice[k]; }));
  }
  return deterministic_realization(spec);
}

RealizationEnumerator::RealizationEnumerator(ProtocolSpec spec, EnumerationOptions options)
    : spec_(spec), options_(options) {
  spec_.validate();
  if (spec_.kind == Protocol::kRandom) {
    bits_ = spec_.intervals + (options_.include_final_flip ? 1 : 0);
  } else if (spec_.kind == Protocol::kHybrid) {
    bits_ = spec_.intervals / 2;
  } else {
    throw InvalidSpec("enumerate_realizations: only R and H protocols are enumerable");
  }
  if (bits_ > options_.cap || bits_ > 62) {
    throw MustSample("enumerate_realizations: 2^" + std::to_string(bits_) +
                         " realizations exceed the enumeration cap; use sample_realizations",
                     options_.cap);
  }
  size_ = std::uint64_t{1} << bits_;
}

WeightedRealization RealizationEnumerator::at(std::uint64_t index) const {
  const int m = spec_.intervals;
  if (spec_.kind == Protocol::kHybrid) {
    auto flips = hybrid_flips(m, [&](int k) { return static_cast<int>((index >> k) & 1u); });
    return {ControlRealization(uniform_grid(spec_), std::move(flips)),
            1.0 / static_cast<double>(size_)};
  }
  std::vector<Flip> flips(m + 1, 0);
  for (int j = 0; j < bits_; ++j) flips[j] = static_cast<Flip>((index >> j) & 1u);
  double weight;
  const double p = spec_.flip_probability;
  if (p == 0.5) {
    weight = 1.0 / static_cast<double>(size_);
  } else {
    const int ones = std::popcount(index);
    weight = std::pow(p, ones) * std::pow(1.0 - p, bits_ - ones);
  }
  return {ControlRealization(uniform_grid(spec_), std::move(flips)), weight};
}

std::optional<WeightedRealization> RealizationEnumerator::next() {
  if (index_ >= size_) return std::nullopt;
  return at(index_++);
}

RealizationDistribution::RealizationDistribution(ProtocolSpec spec) : spec_(spec) {
  spec_.validate();
  if (!is_randomized(spec_.kind))
    throw InvalidSpec("RealizationDistribution: protocol is deterministic");
}

std::vector<ControlRealization> RealizationDistribution::sample(std::size_t count,
                                                                std::uint64_t seed) const {
  std::vector<ControlRealization> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng = make_rng(seed, i);
    out.push_back(sample_realization(spec_, rng));
  }
  return out;
}

RealizationEnumerator RealizationDistribution::enumerate(EnumerationOptions options) const {
  return RealizationEnumerator(spec_, options);
}

BuiltProtocol build_protocol(const ProtocolSpec& spec) {
  spec.validate();
  if (is_randomized(spec.kind)) return RealizationDistribution(spec);
  return deterministic_realization(spec);
}

RealizationEnumerator enumerate_realizations(const ProtocolSpec& spec, EnumerationOptions options) {
  return RealizationEnumerator(spec, options);
}

std::vector<ControlRealization> sample_realizations(const ProtocolSpec& spec, std::size_t count,
                                                    std::uint64_t seed) {
  if (count < 1) throw InvalidSpec("sample_realizations: count must be >= 1");
  if (!is_randomized(spec.kind)) {
    return std::vector<ControlRealization>(count, deterministic_realization(spec));
  }
  return RealizationDistribution(spec).sample(count, seed);
}

long xi_parity(const ControlRealization& r) {
  const int m = r.intervals();
  if (m < 2) throw DomainError("xi_parity: needs M >= 2");
  const auto flips = r.flips();
  long xi = 1;
  int s = 1;
  for (int j = 1; j <= m - 1; ++j) {
    if (flips[j]) s = -s;
    xi += s;
  }
  return xi;
}

Parity total_flip_parity(const ControlRealization& r) {
  int n = 0;
  for (Flip f : r.flips()) n += f;
  return (n % 2 == 0) ? Parity::kEven : Parity::kOdd;
}

namespace {

void append_double(std::string& out, double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  out.append(buf, res.ptr);
}

double parse_double(std::string_view tok) {
  double x = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), x);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw InvalidSpec("realization line: bad number '" + std::string(tok) + "'");
  return x;
}

std::vector<std::string> tokens(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

}  // namespace

std::string to_line(const ControlRealization& r) {
  std::string out;
  const int m = r.intervals();
  const auto dt = r.uniform_dt();
  append_double(out, r.t0());
  out += ' ';
  out += std::to_string(m);
  out += ' ';
  append_double(out, dt ? *dt : (r.horizon() - r.t0()) / m);
  out += " |";
  for (Flip f : r.flips()) {
    out += ' ';
    out += f ? '1' : '0';
  }
  if (!dt) {
    out += " |";
    const auto b = r.boundaries();
    for (int j = 1; j < m; ++j) {
      out += ' ';
      append_double(out, b[j]);
    }
  }
  return out;
}

ControlRealization parse_line(std::string_view line) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t bar; (bar = line.find('|', start)) != std::string_view::npos; start = bar + 1)
    parts.push_back(line.substr(start, bar - start));
  parts.push_back(line.substr(start));
  if (parts.size() < 2 || parts.size() > 3) throw InvalidSpec("realization line: expected 't0 M dt | flags'");
  const auto head = tokens(parts[0]);
  if (head.size() != 3) throw InvalidSpec("realization line: header needs t0 M dt");
  const double t0 = parse_double(head[0]);
  const int m = std::stoi(head[1]);
  const double dt = parse_double(head[2]);
  if (m < 1) throw InvalidSpec("realization line: M must be positive");
  std::vector<Flip> flips;
  for (const auto& t : tokens(parts[1])) {
    if (t != "0" && t != "1") throw InvalidSpec("realization line: flags must be 0 or 1");
    flips.push_back(t == "1" ? 1 : 0);
  }
  if (flips.size() != static_cast<std::size_t>(m) + 1)
    throw InvalidSpec("realization line: expected M+1 flags");
  if (parts.size() == 2) return ControlRealization::uniform(t0, dt, std::move(flips));
  const auto interior = tokens(parts[2]);
  if (interior.size() != static_cast<std::size_t>(m) - 1)
    throw InvalidSpec("realization line: expected M-1 interior boundaries");
  std::vector<double> b{t0};
  for (const auto& t : interior) b.push_back(parse_double(t));
  b.push_back(t0 + m * dt);
  return ControlRealization(std::move(b), std::move(flips));
}

UnitaryMatrix pauli_x() {
  UnitaryMatrix m;
  m << 0, 1, 1, 0;
  return m;
}

UnitaryMatrix pauli_z() {
  UnitaryMatrix m;
  m << 1, 0, 0, -1;
  return m;
}

UnitaryMatrix rotation_z(double angle) {
  using namespace std::complex_literals;
  UnitaryMatrix m = UnitaryMatrix::Zero();
  m(0, 0) = std::exp(-0.5i * angle);
  m(1, 1) = std::exp(0.5i * angle);
  return m;
}

UnitaryMatrix rotation_x(double angle) {
  using namespace std::complex_literals;
  const double c = std::cos(angle / 2);
  const double s = std::sin(angle / 2);
  UnitaryMatrix m;
  m << c, -1i * s, -1i * s, c;
  return m;
}

UnitaryMatrix free_propagator(double omega0, double a, double b) {
  return rotation_z(omega0 * (b - a));
}

UnitaryMatrix pulse_propagator(PulseConvention convention, Picture picture, double t_j,
                               double omega0) {
  const UnitaryMatrix flip = rotation_x(std::numbers::pi);
  const double phase = omega0 * t_j;
  const bool conjugate =
      (convention == PulseConvention::kIdenticalPhysical) == (picture == Picture::kInteraction);
  if (!conjugate) return flip;
  if (picture == Picture::kInteraction) {
    // exp(i w t sz/2) X exp(-i w t sz/2)
    return rotation_z(-phase) * flip * rotation_z(phase);
  }
  // exp(-i w t sz/2) X exp(i w t sz/2)
  return rotation_z(phase) * flip * rotation_z(-phase);
}

UnitaryMatrix two_pulse_cycle_propagator(PulseConvention convention, double omega0, double t0,
                                         double t1, double t2) {
  if (!(t0 < t1 && t1 < t2)) throw DomainError("two_pulse_cycle_propagator: need t0 < t1 < t2");
  const UnitaryMatrix p1 = pulse_propagator(convention, Picture::kPhysical, t1, omega0);
  const UnitaryMatrix p2 = pulse_propagator(convention, Picture::kPhysical, t2, omega0);
  return p2 * free_propagator(omega0, t1, t2) * p1 * free_propagator(omega0, t0, t1);
}

double projective_distance(const UnitaryMatrix& a, const UnitaryMatrix& b) {
  const std::complex<double> overlap = (b.adjoint() * a).trace();
  const std::complex<double> phase = overlap == 0.0 ? 1.0 : overlap / std::abs(overlap);
  return (a - phase * b).norm();
}

double unitarity_defect(const UnitaryMatrix& u) {
  return (u.adjoint() * u - UnitaryMatrix::Identity()).cwiseAbs().maxCoeff();
}

}  // namespace bbdd
