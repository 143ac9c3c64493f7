// blindchan: run the BER experiments and write the results as CSV.
//
//   blindchan run --scenario fig13 --out fig13.csv
//   blindchan run --scenario custom --config my.cfg --rho 0.5 --snr 0:2:20 --out r.csv
//
// Exit codes: 0 success, 2 invalid configuration, 3 I/O failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "blindchan/experiments.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CP-OFDM subspace blind channel estimation experiments"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run a preset or custom scenario and write a CSV");
    std::optional<std::string> scenario;
    std::optional<double> rho;
    std::optional<double> ff;
    std::optional<std::string> snr;
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> config;
    std::optional<int> workers;
    std::string out;
    run->add_option("--scenario", scenario, "fig12 | fig13 | fig14 | custom");
    run->add_option("--rho", rho, "Nearby-channel correlation coefficient (applied to every curve)");
    run->add_option("--ff", ff, "Forgetting factor (applied to every curve)");
    run->add_option("--snr", snr, "SNR grid LO:STEP:HI in dB");
    run->add_option("--trials", trials, "Monte Carlo trials per SNR point");
    run->add_option("--seed", seed, "Base seed");
    run->add_option("--config", config, "Key/value config file; flags override it");
    run->add_option("--workers", workers, "Worker threads (0 = all cores)");
    run->add_option("--out", out, "Output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        std::vector<std::pair<std::string, std::string>> settings;
        std::string preset_name = "custom";
        if (config) {
            for (auto& [k, v] : blindchan::read_config(*config)) {
                if (k == "scenario") {
                    preset_name = v;
                } else {
                    settings.emplace_back(k, v);
                }
            }
        }
        if (scenario) preset_name = *scenario;
        auto put = [&](const char* key, const auto& value) {
            if (value) settings.emplace_back(key, [&] {
                if constexpr (std::is_same_v<std::decay_t<decltype(*value)>, std::string>) {
                    return *value;
                } else {
                    return std::to_string(*value);
                }
            }());
        };
        put("rho", rho);
        put("ff", ff);
        put("snr", snr);
        put("trials", trials);
        put("seed", seed);
        put("workers", workers);

        blindchan::Experiment exp = blindchan::preset(preset_name);
        for (auto& s : exp.curves) {
            for (const auto& [k, v] : settings) blindchan::apply_setting(s, k, v);
            s.validate();
        }
        const auto curves = blindchan::run_experiment(exp);
        blindchan::write_csv(curves, out);
        for (const auto& c : curves) {
            for (const auto& p : c.points) {
                std::printf("%-16s %-18s rho=%-5g ff=%-5g snr=%5.1f dB  ber=%.4e  nmse=%.4e  invalid=%d\n",
                            c.scenario.name.c_str(), std::string(blindchan::to_string(c.scenario.estimator)).c_str(),
                            c.scenario.rho, c.scenario.ff, p.snr_db, p.ber, p.mean_nmse, p.invalid_trials);
            }
        }
    } catch (const blindchan::IoError& e) {
        std::cerr << "blindchan: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "blindchan: invalid configuration: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "blindchan: invalid configuration: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "blindchan: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
