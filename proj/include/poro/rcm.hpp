#ifndef PORO_RCM_HPP
#define PORO_RCM_HPP

#include <algorithm>
#include <queue>
#include <vector>

namespace poro {

// Reverse Cuthill-McKee ordering of an undirected graph given as adjacency
// lists. Returns `order` with order[k] = original vertex placed at position k.
// Each connected component is numbered contiguously.
inline std::vector<int> rcm_order(const std::vector<std::vector<int>>& adj) {
    const int n = static_cast<int>(adj.size());
    std::vector<int> order;
    order.reserve(n);
    std::vector<int> level(n), degree(n);
    for (int v = 0; v < n; ++v) degree[v] = static_cast<int>(adj[v].size());
    std::vector<char> visited(n, 0);

    auto bfs_levels = [&](int root, std::vector<int>& out_last_level) -> int {
        std::fill(level.begin(), level.end(), -1);
        std::queue<int> q;
        q.push(root);
        level[root] = 0;
        int maxlev = 0;
        out_last_level.clear();
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            if (level[v] > maxlev) maxlev = level[v];
            for (int w : adj[v])
                if (level[w] < 0 && !visited[w]) {
                    level[w] = level[v] + 1;
                    q.push(w);
                }
        }
        for (int v = 0; v < n; ++v)
            if (level[v] == maxlev) out_last_level.push_back(v);
        return maxlev;
    };

    std::vector<int> last;
    for (int seed = 0; seed < n; ++seed) {
        if (visited[seed]) continue;
        // pseudo-peripheral start: walk to the far end of the component
        int root = seed;
        int ecc = bfs_levels(root, last);
        while (true) {
            int cand = *std::min_element(last.begin(), last.end(), [&](int a, int b) {
                return degree[a] != degree[b] ? degree[a] < degree[b] : a < b;
            });
            int ecc2 = bfs_levels(cand, last);
            if (ecc2 <= ecc) break;
            ecc = ecc2;
            root = cand;
        }

        // Cuthill-McKee BFS with degree-sorted neighbor visits
        std::queue<int> q;
        q.push(root);
        visited[root] = 1;
        std::vector<int> nbrs;
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            order.push_back(v);
            nbrs.clear();
            for (int w : adj[v])
                if (!visited[w]) {
                    visited[w] = 1;
                    nbrs.push_back(w);
                }
            std::sort(nbrs.begin(), nbrs.end(), [&](int a, int b) {
                return degree[a] != degree[b] ? degree[a] < degree[b] : a < b;
            });
            for (int w : nbrs) q.push(w);
        }
    }
    std::reverse(order.begin(), order.end());
    return order;
}

// Bandwidth of the graph under a given ordering (order[k] = old index).
inline int graph_bandwidth(const std::vector<std::vector<int>>& adj,
                           const std::vector<int>& order) {
    const int n = static_cast<int>(adj.size());
    std::vector<int> pos(n);
    for (int k = 0; k < n; ++k) pos[order[k]] = k;
    int bw = 0;
    for (int v = 0; v < n; ++v)
        for (int w : adj[v]) bw = std::max(bw, std::abs(pos[v] - pos[w]));
    return bw;
}

} // namespace poro

#endif
