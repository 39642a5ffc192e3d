#include "mml/flow.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace mml {

MaxFlow::MaxFlow(std::size_t nodes, double eps) : adj_(nodes), level_(nodes), it_(nodes), eps_(eps) {}

std::size_t MaxFlow::add_edge(std::size_t from, std::size_t to, double cap) {
    std::size_t id = edges_.size();
    edges_.push_back({to, cap, cap});
    adj_[from].push_back(id);
    edges_.push_back({from, 0.0, 0.0});
    adj_[to].push_back(id + 1);
    return id;
}

bool MaxFlow::bfs(std::size_t s, std::size_t t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<std::size_t> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
        std::size_t v = q.front();
        q.pop();
        for (std::size_t id : adj_[v]) {
            const Edge& e = edges_[id];
            if (e.cap > eps_ && level_[e.to] < 0) {
                level_[e.to] = level_[v] + 1;
                q.push(e.to);
            }
        }
    }
    return level_[t] >= 0;
}

double MaxFlow::dfs(std::size_t v, std::size_t t, double pushed) {
    if (v == t) return pushed;
    for (std::size_t& i = it_[v]; i < adj_[v].size(); ++i) {
        std::size_t id = adj_[v][i];
        Edge& e = edges_[id];
        if (e.cap <= eps_ || level_[e.to] != level_[v] + 1) continue;
        double got = dfs(e.to, t, std::min(pushed, e.cap));
        if (got > 0) {
            e.cap -= got;
            edges_[id ^ 1].cap += got;
            return got;
        }
    }
    return 0;
}

double MaxFlow::run(std::size_t s, std::size_t t) {
    double total = 0;
    while (bfs(s, t)) {
        std::fill(it_.begin(), it_.end(), 0);
        while (double f = dfs(s, t, std::numeric_limits<double>::infinity())) total += f;
    }
    return total;
}

double MaxFlow::flow(std::size_t edge) const { return edges_[edge].orig - edges_[edge].cap; }

}  // namespace mml
