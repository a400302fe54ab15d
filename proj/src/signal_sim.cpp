#include "robsub/signal_sim.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/random/bernoulli_distribution.hpp>

namespace robsub {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

} // namespace

void ArrayGeometry::validate() const {
    require(m >= 2, "ArrayGeometry: need at least two channels");
    require(spacing_wavelengths > 0.0, "ArrayGeometry: spacing must be positive");
}

Eigen::VectorXcd steering_vector(const ArrayGeometry& geom, double theta) {
    geom.validate();
    require(theta >= 0.0 && theta <= std::numbers::pi, "steering_vector: theta must lie in [0, pi]");
    const double phase_step = -2.0 * std::numbers::pi * geom.spacing_wavelengths * std::cos(theta);
    Eigen::VectorXcd a(geom.m);
    for (Index k = 0; k < geom.m; ++k) a[k] = std::polar(1.0, phase_step * static_cast<double>(k));
    return a;
}

std::string regime_name(const InterferenceRegime& regime) {
    return std::visit(overloaded{[](const RandomInterference&) { return std::string("random"); },
                                 [](const DirectedRandomAmplitude&) { return std::string("directed-rand-amp"); },
                                 [](const DirectedConstant&) { return std::string("directed-const"); }},
                      regime);
}

std::string regime_descriptor(const InterferenceRegime& regime) {
    std::ostringstream os;
    os.precision(10);
    std::visit(overloaded{[&](const RandomInterference& r) {
                              os << "random;p=" << r.p << ";sigma_delta=" << r.sigma_delta;
                          },
                          [&](const DirectedRandomAmplitude& r) {
                              os << "directed-rand-amp;p=" << r.p << ";sigma_delta=" << r.sigma_delta
                                 << ";doa_interf=" << r.doa_interf;
                          },
                          [&](const DirectedConstant& r) {
                              os << "directed-const;p=" << r.p << ";s_delta=" << r.s_delta
                                 << ";doa_interf=" << r.doa_interf;
                          }},
               regime);
    return os.str();
}

double regime_probability(const InterferenceRegime& regime) {
    return std::visit([](const auto& r) { return r.p; }, regime);
}

void ScenarioConfig::validate() const {
    geometry().validate();
    require(d == 1, "ScenarioConfig: the simulator generates single-source (d = 1) scenarios");
    require(d < m, "ScenarioConfig: need d < m");
    require(n >= 1, "ScenarioConfig: need at least one snapshot");
    require(signal_freq_hz > 0.0 && sample_rate_hz > 0.0, "ScenarioConfig: frequencies must be positive");
    require(doa_rad > 0.0 && doa_rad < std::numbers::pi, "ScenarioConfig: doa must lie in (0, pi)");
    require(sigma_eps > 0.0, "ScenarioConfig: sigma_eps must be positive");
    std::visit(overloaded{[](const RandomInterference& r) {
                              require(r.p >= 0.0 && r.p <= 1.0, "ScenarioConfig: p must lie in [0, 1]");
                              require(r.sigma_delta > 0.0, "ScenarioConfig: sigma_delta must be positive");
                          },
                          [](const DirectedRandomAmplitude& r) {
                              require(r.p >= 0.0 && r.p <= 1.0, "ScenarioConfig: p must lie in [0, 1]");
                              require(r.sigma_delta > 0.0, "ScenarioConfig: sigma_delta must be positive");
                              require(r.doa_interf > 0.0 && r.doa_interf < std::numbers::pi,
                                      "ScenarioConfig: interference doa must lie in (0, pi)");
                          },
                          [](const DirectedConstant& r) {
                              require(r.p >= 0.0 && r.p <= 1.0, "ScenarioConfig: p must lie in [0, 1]");
                              require(r.s_delta > 0.0, "ScenarioConfig: s_delta must be positive");
                              require(r.doa_interf > 0.0 && r.doa_interf < std::numbers::pi,
                                      "ScenarioConfig: interference doa must lie in (0, pi)");
                          }},
               regime);
}

std::vector<bool> LabeledDataset::truth_flags() const {
    std::vector<bool> out(static_cast<std::size_t>(X.n()), false);
    for (Index i : truth_support) out[static_cast<std::size_t>(i)] = true;
    return out;
}

Eigen::VectorXcd complex_gaussian(Index dim, double sigma, Rng& rng) {
    require(sigma > 0.0, "complex_gaussian: sigma must be positive");
    Eigen::VectorXcd v(dim);
    for (Index k = 0; k < dim; ++k) v[k] = complex_normal(rng, sigma);
    return v;
}

LabeledDataset generate(const ScenarioConfig& cfg) {
    cfg.validate();
    const ArrayGeometry geom = cfg.geometry();
    const Eigen::VectorXcd a0 = steering_vector(geom, cfg.doa_rad);

    Eigen::VectorXcd B;
    std::visit(overloaded{[](const RandomInterference&) {},
                          [&](const DirectedRandomAmplitude& r) { B = steering_vector(geom, r.doa_interf); },
                          [&](const DirectedConstant& r) { B = steering_vector(geom, r.doa_interf); }},
               cfg.regime);

    Rng rng(cfg.seed);
    boost::random::bernoulli_distribution<double> flag(regime_probability(cfg.regime));

    Eigen::MatrixXcd X(cfg.m, cfg.n);
    Eigen::MatrixXcd delta = Eigen::MatrixXcd::Zero(cfg.m, cfg.n);
    Eigen::VectorXcd s(cfg.n);
    std::vector<Index> support;
    const double omega = 2.0 * std::numbers::pi * cfg.signal_freq_hz / cfg.sample_rate_hz;

    for (Index i = 0; i < cfg.n; ++i) {
        s[i] = std::polar(1.0, omega * static_cast<double>(i));
        const bool hit = flag(rng);
        X.col(i) = a0 * s[i] + complex_gaussian(cfg.m, cfg.sigma_eps, rng);
        if (!hit) continue;
        std::visit(overloaded{[&](const RandomInterference& r) {
                                  delta.col(i) = complex_gaussian(cfg.m, r.sigma_delta, rng);
                              },
                              [&](const DirectedRandomAmplitude& r) {
                                  delta.col(i) = std::abs(standard_normal(rng) * r.sigma_delta) * B;
                              },
                              [&](const DirectedConstant& r) { delta.col(i) = r.s_delta * B; }},
                   cfg.regime);
        X.col(i) += delta.col(i);
        support.push_back(i);
    }

    return LabeledDataset{SnapshotMatrix(std::move(X)), std::move(support), a0, std::move(s), std::move(delta)};
}

} // namespace robsub
