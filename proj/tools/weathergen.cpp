#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rainpipe/errors.hpp"
#include "rainpipe/synth.hpp"

int main(int argc, char** argv) {
    CLI::App app{"synthetic weather dataset generator (same schema and shape as the real file)"};

    std::string out;
    rainpipe::synth::WeatherSynthConfig cfg;
    app.add_option("--out", out, "output CSV path")->required();
    app.add_option("--rows", cfg.n_rows, "total rows (default matches the reference dataset)");
    app.add_option("--yes", cfg.n_yes, "rows labeled RainTomorrow = Yes");
    app.add_option("--seed", cfg.seed, "generator seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (cfg.n_yes > cfg.n_rows) {
            throw rainpipe::ConfigError("--yes cannot exceed --rows");
        }
        rainpipe::synth::write_weather_csv(out, cfg);
        std::cout << "wrote " << cfg.n_rows << " rows (" << cfg.n_yes << " positive) to " << out
                  << "\n";
        return 0;
    } catch (const rainpipe::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const rainpipe::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
