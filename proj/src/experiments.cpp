#include "blindchan/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "blindchan/channel.hpp"
#include "blindchan/pilot.hpp"
#include "blindchan/subspace.hpp"

namespace blindchan {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent generator streams inside one trial.
enum Stream : std::uint64_t { kChannel = 1, kNearbyNoise, kMainNoise, kData, kPayload, kPayloadNoise };

Rng stream(std::uint64_t trial_seed, Stream id) { return Rng(splitmix64(trial_seed ^ (id << 56))); }

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
    text = trim(text);
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("invalid value '" + std::string(text) + "' for " + std::string(what));
    }
    return value;
}

double parse_real(std::string_view text, std::string_view what) {
    const auto t = trim(text);
    if (t == "nan") return std::numeric_limits<double>::quiet_NaN();
    return parse_number<double>(t, what);
}

bool parse_bool(std::string_view text, std::string_view what) {
    const auto t = trim(text);
    if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
    if (t == "0" || t == "false" || t == "no" || t == "off") return false;
    throw ConfigError("invalid boolean '" + std::string(t) + "' for " + std::string(what));
}

struct Transmission {
    PilotFrame frame;
    CVector last_rx_time;
};

Transmission send_pilots(ChannelLine& line, const std::vector<CVector>& pilots,
                         const OfdmConfig& cfg, Rng& noise) {
    Transmission out;
    for (const auto& p : pilots) {
        CVector rx = line.propagate(ofdm_modulate(p, cfg), noise);
        out.frame.tx_freq.push_back(p);
        out.frame.rx_freq.push_back(ofdm_demodulate(rx, cfg));
        out.last_rx_time = std::move(rx);
    }
    return out;
}

CVector random_qpsk_block(const OfdmConfig& cfg, Rng& rng, BitStream& bits) {
    std::bernoulli_distribution coin(0.5);
    bits.resize(static_cast<std::size_t>(2 * cfg.subcarriers));
    for (auto& b : bits) b = coin(rng) ? 1 : 0;
    return qpsk_modulate(bits);
}

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

std::string_view to_string(EstimatorKind e) {
    switch (e) {
        case EstimatorKind::blind: return "blind";
        case EstimatorKind::pilot: return "pilot";
        case EstimatorKind::blind_nearby_init: return "blind_nearby_init";
    }
    return "?";
}

EstimatorKind parse_estimator(std::string_view s) {
    s = trim(s);
    if (s == "blind") return EstimatorKind::blind;
    if (s == "pilot") return EstimatorKind::pilot;
    if (s == "blind_nearby_init") return EstimatorKind::blind_nearby_init;
    throw ConfigError("unknown estimator '" + std::string(s) + "'");
}

void Scenario::validate() const {
    try {
        cfg.validate();
        (void)PowerDelayProfile::normalized(pdp);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    if (static_cast<int>(pdp.size()) != cfg.taps()) {
        throw ConfigError("pdp has " + std::to_string(pdp.size()) + " taps but max_delay implies " +
                          std::to_string(cfg.taps()));
    }
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (snr_grid_db.empty()) throw ConfigError("SNR grid is empty");
    if (!(ff > 0.0 && ff <= 1.0)) throw ConfigError("ff must lie in (0, 1]");
    if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("rho must lie in [0, 1]");
    if (payload_bits < 2) throw ConfigError("payload_bits must be >= 2");
    if (workers < 0) throw ConfigError("workers must be >= 0");
    if (!perfect_csi) {
        if (estimator == EstimatorKind::pilot && cfg.pilot_symbols < 1) {
            throw ConfigError("pilot estimator needs pilot_symbols >= 1");
        }
        if (estimator != EstimatorKind::pilot) {
            if (ambiguity_pilots < 1) throw ConfigError("blind estimators need ambiguity_pilots >= 1");
            if (estimator == EstimatorKind::blind_nearby_init && cfg.pilot_symbols < 1) {
                throw ConfigError("nearby initialization needs pilot_symbols >= 1");
            }
        }
    }
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
    return splitmix64(seed ^ splitmix64(trial));
}

TrialResult run_trial(const Scenario& s, double snr_db, int trial) {
    const OfdmConfig& cfg = s.cfg;
    const std::uint64_t ts = trial_seed(s.seed, static_cast<std::uint64_t>(trial));
    Rng chan_rng = stream(ts, kChannel);
    Rng nearby_noise = stream(ts, kNearbyNoise);
    Rng main_noise = stream(ts, kMainNoise);
    Rng data_rng = stream(ts, kData);
    Rng payload_rng = stream(ts, kPayload);
    Rng payload_noise = stream(ts, kPayloadNoise);

    const NearbyPairSpec pair_spec{s.rho, PowerDelayProfile::normalized(s.pdp)};
    auto [h_main, h_nearby] = draw_correlated_pair(pair_spec, cfg.cp_len, chan_rng);
    const double noise_var = snr_to_noise_var(snr_db);
    ChannelLine main(h_main, noise_var);

    TrialResult result;
    ChannelEstimate est;
    if (s.perfect_csi) {
        est.taps = h_main;
    } else if (s.estimator == EstimatorKind::pilot) {
        const auto sent = send_pilots(main, make_pilot_blocks(cfg.pilot_symbols, cfg), cfg, main_noise);
        est = ls_estimate(sent.frame, cfg);
    } else {
        AutocorrState init;
        if (s.estimator == EstimatorKind::blind) {
            init = autocorr_init_isotropic(1.0, cfg, s.ff);
        } else {
            ChannelLine nearby(h_nearby, s.noiseless_nearby_pilots ? 0.0 : noise_var);
            const auto sent =
                send_pilots(nearby, make_pilot_blocks(cfg.pilot_symbols, cfg), cfg, nearby_noise);
            const ChannelEstimate nearby_est = ls_estimate(sent.frame, cfg);
            // With noiseless pilots the fit residual is zero; the link noise level
            // is then known exactly and used instead.
            const double init_noise = s.noiseless_nearby_pilots ? noise_var : nearby_est.residual;
            init = autocorr_init_from_nearby(nearby_est, init_noise, cfg, s.ff);
        }
        SubspaceEstimator tracker(cfg, std::move(init));
        const auto amb = send_pilots(main, make_pilot_blocks(s.ambiguity_pilots, cfg), cfg, main_noise);
        tracker.push_block(amb.last_rx_time);
        BitStream bits;
        for (int k = 0; k < cfg.observed_symbols; ++k) {
            const CVector tx = ofdm_modulate(random_qpsk_block(cfg, data_rng, bits), cfg);
            tracker.push_block(main.propagate(tx, main_noise));
        }
        const auto blind = tracker.estimate();
        if (!blind) {
            result.valid = false;
            return result;
        }
        est = resolve_ambiguity(*blind, amb.frame, cfg);
    }
    result.nmse = nmse(est.taps, h_main);

    const CVector chan_freq = frequency_response(est.taps.taps, cfg.subcarriers);
    const int bits_per_block = 2 * cfg.subcarriers;
    const int blocks = (s.payload_bits + bits_per_block - 1) / bits_per_block;
    BitStream bits;
    for (int b = 0; b < blocks; ++b) {
        const CVector freq = random_qpsk_block(cfg, payload_rng, bits);
        const CVector rx = main.propagate(ofdm_modulate(freq, cfg), payload_noise);
        const BitStream decided = qpsk_demodulate(zf_equalize(ofdm_demodulate(rx, cfg), chan_freq).symbols);
        for (std::size_t i = 0; i < bits.size(); ++i) result.bit_errors += decided[i] != bits[i];
        result.bits += static_cast<std::int64_t>(bits.size());
    }
    return result;
}

std::vector<BerPoint> run_scenario(const Scenario& s) {
    s.validate();
    const int workers = s.workers > 0 ? s.workers
                                      : std::max(1u, std::thread::hardware_concurrency());
    std::vector<BerPoint> points;
    for (const double snr : s.snr_grid_db) {
        std::vector<TrialResult> results(static_cast<std::size_t>(s.trials));
        std::atomic<int> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto work = [&] {
            for (int t = next++; t < s.trials; t = next++) {
                try {
                    results[static_cast<std::size_t>(t)] = run_trial(s, snr, t);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        };
        if (workers == 1) {
            work();
        } else {
            std::vector<std::jthread> pool;
            for (int w = 0; w < std::min(workers, s.trials); ++w) pool.emplace_back(work);
        }
        if (failure) std::rethrow_exception(failure);

        BerPoint pt;
        pt.snr_db = snr;
        double nmse_sum = 0.0;
        for (const auto& r : results) {
            if (!r.valid) {
                ++pt.invalid_trials;
                continue;
            }
            pt.bits += r.bits;
            pt.bit_errors += r.bit_errors;
            nmse_sum += r.nmse;
        }
        const int counted = s.trials - pt.invalid_trials;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        pt.ber = pt.bits > 0 ? static_cast<double>(pt.bit_errors) / static_cast<double>(pt.bits) : nan;
        pt.mean_nmse = counted > 0 ? nmse_sum / counted : nan;
        points.push_back(pt);
    }
    return points;
}

std::vector<Curve> run_experiment(const Experiment& e) {
    std::vector<Curve> curves;
    for (const auto& s : e.curves) curves.push_back({s, run_scenario(s)});
    return curves;
}

Experiment scenario_fig12() {
    Scenario blind;
    blind.name = "main_channel";
    blind.estimator = EstimatorKind::blind;
    blind.ff = 0.98;
    Scenario pilot = blind;
    pilot.estimator = EstimatorKind::pilot;
    return {"fig12", {blind, pilot}};
}

Experiment scenario_fig13() {
    Experiment e{"fig13", {}};
    for (const double rho : {0.98, 0.68, 0.11}) {
        Scenario s;
        s.name = "nearby_assisted";
        s.estimator = EstimatorKind::blind_nearby_init;
        s.ff = 0.98;
        s.rho = rho;
        e.curves.push_back(s);
    }
    return e;
}

Experiment scenario_fig14() {
    Experiment e{"fig14", {}};
    for (const double rho : {0.68, 0.11}) {
        Scenario s;
        s.name = "forgetting_sweep";
        s.estimator = EstimatorKind::blind_nearby_init;
        s.ff = 0.7;
        s.rho = rho;
        e.curves.push_back(s);
    }
    return e;
}

Experiment preset(std::string_view name) {
    name = trim(name);
    if (name == "fig12") return scenario_fig12();
    if (name == "fig13") return scenario_fig13();
    if (name == "fig14") return scenario_fig14();
    if (name == "custom") return {"custom", {Scenario{}}};
    throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

std::vector<double> parse_snr_grid(std::string_view spec) {
    spec = trim(spec);
    std::vector<double> grid;
    if (spec.find(':') != std::string_view::npos) {
        const auto parts = split(spec, ':');
        if (parts.size() != 3) throw ConfigError("SNR range must be LO:STEP:HI");
        const double lo = parse_real(parts[0], "snr LO");
        const double step = parse_real(parts[1], "snr STEP");
        const double hi = parse_real(parts[2], "snr HI");
        if (!(step > 0.0) || hi < lo) throw ConfigError("SNR range needs STEP > 0 and HI >= LO");
        const auto n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
        for (int i = 0; i <= n; ++i) grid.push_back(lo + i * step);
    } else {
        for (const auto part : split(spec, ',')) grid.push_back(parse_real(part, "snr"));
    }
    if (grid.empty()) throw ConfigError("SNR grid is empty");
    return grid;
}

void apply_setting(Scenario& s, std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    if (key == "name") {
        s.name = std::string(value);
    } else if (key == "estimator") {
        s.estimator = parse_estimator(value);
    } else if (key == "rho") {
        s.rho = parse_real(value, key);
    } else if (key == "ff") {
        s.ff = parse_real(value, key);
    } else if (key == "snr") {
        s.snr_grid_db = parse_snr_grid(value);
    } else if (key == "trials") {
        s.trials = parse_number<int>(value, key);
    } else if (key == "seed") {
        s.seed = parse_number<std::uint64_t>(value, key);
    } else if (key == "subcarriers") {
        s.cfg.subcarriers = parse_number<int>(value, key);
    } else if (key == "cp_len") {
        s.cfg.cp_len = parse_number<int>(value, key);
    } else if (key == "max_delay") {
        s.cfg.max_delay = parse_number<int>(value, key);
        s.pdp.assign(static_cast<std::size_t>(std::max(1, s.cfg.taps())), 1.0 / std::max(1, s.cfg.taps()));
    } else if (key == "pilot_symbols") {
        s.cfg.pilot_symbols = parse_number<int>(value, key);
    } else if (key == "observed_symbols") {
        s.cfg.observed_symbols = parse_number<int>(value, key);
    } else if (key == "pdp") {
        s.pdp.clear();
        for (const auto part : split(value, ',')) s.pdp.push_back(parse_real(part, key));
        s.cfg.max_delay = static_cast<int>(s.pdp.size()) - 1;
    } else if (key == "payload_bits") {
        s.payload_bits = parse_number<int>(value, key);
    } else if (key == "ambiguity_pilots") {
        s.ambiguity_pilots = parse_number<int>(value, key);
    } else if (key == "perfect_csi") {
        s.perfect_csi = parse_bool(value, key);
    } else if (key == "noiseless_nearby_pilots") {
        s.noiseless_nearby_pilots = parse_bool(value, key);
    } else if (key == "workers") {
        s.workers = parse_number<int>(value, key);
    } else {
        throw ConfigError("unknown setting '" + std::string(key) + "'");
    }
}

std::vector<std::pair<std::string, std::string>> parse_config(std::istream& in) {
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view(line);
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        out.emplace_back(std::string(trim(view.substr(0, eq))), std::string(trim(view.substr(eq + 1))));
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> read_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    return parse_config(in);
}

std::string format_csv(const std::vector<Curve>& curves) {
    std::ostringstream out;
    out << kCsvHeader << '\n';
    for (const auto& c : curves) {
        const auto& s = c.scenario;
        for (const auto& p : c.points) {
            out << s.name << ',' << to_string(s.estimator) << ',' << format_real(s.rho) << ','
                << format_real(s.ff) << ',' << s.seed << ',' << format_real(p.snr_db) << ','
                << p.bits << ',' << p.bit_errors << ',' << format_real(p.ber) << ','
                << format_real(p.mean_nmse) << ',' << p.invalid_trials << '\n';
        }
    }
    return out.str();
}

void write_csv(const std::vector<Curve>& curves, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << format_csv(curves);
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

void write_csv(const std::vector<BerPoint>& points, const Scenario& meta,
               const std::filesystem::path& path) {
    write_csv(std::vector<Curve>{{meta, points}}, path);
}

std::vector<CsvRow> parse_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != kCsvHeader) {
        throw ConfigError("CSV header mismatch");
    }
    std::vector<CsvRow> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto f = split(trim(line), ',');
        if (f.size() != 11) {
            throw ConfigError("CSV line " + std::to_string(lineno) + ": expected 11 fields");
        }
        CsvRow r;
        r.scenario = std::string(f[0]);
        r.estimator = std::string(f[1]);
        r.rho = parse_real(f[2], "rho");
        r.ff = parse_real(f[3], "ff");
        r.seed = parse_number<std::uint64_t>(f[4], "seed");
        r.point.snr_db = parse_real(f[5], "snr_db");
        r.point.bits = parse_number<std::int64_t>(f[6], "bits");
        r.point.bit_errors = parse_number<std::int64_t>(f[7], "bit_errors");
        r.point.ber = parse_real(f[8], "ber");
        r.point.mean_nmse = parse_real(f[9], "mean_nmse");
        r.point.invalid_trials = parse_number<int>(f[10], "invalid_trials");
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<CsvRow> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return parse_csv(in);
}

}  // namespace blindchan
