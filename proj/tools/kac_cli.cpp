#include <iostream>

#include "kac/experiment.hpp"

int main(int argc, char** argv) {
    try {
        const kac::RunConfig cfg = kac::parse_config(argc, argv);
        const kac::RunResult res = kac::run_experiment(cfg);
        std::cout << "wrote " << res.files.size() << " files to " << cfg.output_dir << '\n';
        return 0;
    } catch (const kac::HelpRequested& h) {
        std::cout << h.what();
        return 0;
    } catch (const kac::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
