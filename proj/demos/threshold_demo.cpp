// Solves the three reward regimes at one operating point and prints how the
// update probability u_i grows with the AoI, next to the long-run metrics.

#include "aoigame/aoigame.hpp"

#include <cstdio>

int main() {
    using namespace aoigame;
    const ModelParams params{10, 50.0, 0.95, 300, 251};
    for (RewardKind kind : all_kinds) {
        const Solution solved = value_iteration(params, kind);
        const ChainStats stats = chain_metrics(solved.policy, params, kind);
        const ThresholdReport th = extract_threshold(solved.policy.probs);
        std::printf("%-11s U=%.4f AoI=%.3f C=%.3f R=%.3f %s\n", to_string(kind).c_str(),
                    stats.avg_update, stats.avg_aoi, stats.avg_cost, stats.avg_reward,
                    th.is_hard() ? ("threshold " + std::to_string(*th.threshold())).c_str()
                                 : "smooth");
        std::printf("  u_i:");
        for (int i : {0, 1, 2, 5, 10, 20, 50, 100})
            std::printf(" %d:%.3f", i, stats.update_probs[static_cast<std::size_t>(i)]);
        std::printf("\n");
    }
}
