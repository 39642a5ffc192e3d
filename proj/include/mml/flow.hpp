#pragma once

#include <cstddef>
#include <vector>

namespace mml {

// Dinic max-flow with real capacities. Residuals below `eps` count as saturated.
class MaxFlow {
public:
    explicit MaxFlow(std::size_t nodes, double eps = 1e-15);
    // Returns the edge id; its flow is available after run().
    std::size_t add_edge(std::size_t from, std::size_t to, double cap);
    double run(std::size_t s, std::size_t t);
    double flow(std::size_t edge) const;

private:
    struct Edge {
        std::size_t to;
        double cap;
        double orig;
    };
    bool bfs(std::size_t s, std::size_t t);
    double dfs(std::size_t v, std::size_t t, double pushed);

    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> adj_;
    std::vector<int> level_;
    std::vector<std::size_t> it_;
    double eps_;
};

}  // namespace mml
