// Minimal library usage: load a channel, sweep the helper budget, print the
// capacity curve.

#include <iostream>

#include "hcap/hcap.hpp"

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: sweep_demo <channel.json>\n";
        return 2;
    }
    const hcap::Channel ch = hcap::load_channel(argv[1]);
    std::cout << "H(S) = " << hcap::format_num(ch.state_entropy()) << "\n";

    std::vector<double> budgets;
    for (int i = 0; i <= 8; ++i) budgets.push_back(0.25 * i / 2.0);
    hcap::OptimOptions opts;
    opts.restarts = 32;
    for (const auto& res : hcap::sweep(ch, budgets, opts))
        std::cout << "C(" << hcap::format_num(res.rh) << ") = " << hcap::format_num(res.c)
                  << "  [r0 " << hcap::format_num(res.r0) << ", support "
                  << res.policy.v_size << "]\n";
    return 0;
}
