#include "momenta/patterns.hpp"
#include "momenta/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace momenta {

std::string TensorSymbol::name() const {
    if (kind == Kind::moment) return std::to_string(order) + "M";
    return std::to_string(order) + "_" + std::to_string(rank) + "H";
}

int ContractionPattern::total_rank() const {
    int r = 0;
    for (const auto& f : factors) r += f.rank;
    return r;
}

bool ContractionPattern::pure() const {
    for (const auto& f : factors)
        if (f != factors.front()) return false;
    return true;
}

bool ContractionPattern::homogeneous() const {
    for (const auto& f : factors)
        if (f.order != factors.front().order) return false;
    return true;
}

namespace {

// Per-factor label lists: equal labels mark paired positions, labels numbered
// by first appearance.
std::vector<std::vector<int>> label_groups(const ContractionPattern& p) {
    int total = 0;
    std::vector<int> width;
    for (const auto& f : p.factors) {
        width.push_back(f.rank);
        total += f.rank;
    }
    std::vector<int> label(total + 1, 0);
    auto pairs = p.pairing.pairs;
    std::sort(pairs.begin(), pairs.end(), [](auto& a, auto& b) {
        return std::min(a.first, a.second) < std::min(b.first, b.second);
    });
    int next = 1;
    for (const auto& [a, b] : pairs) {
        label[a] = label[b] = next++;
    }
    std::vector<std::vector<int>> groups;
    int pos = 1;
    for (int w : width) {
        std::vector<int> g;
        for (int k = 0; k < w; ++k) g.push_back(label[pos++]);
        std::sort(g.begin(), g.end());
        groups.push_back(std::move(g));
    }
    return groups;
}

} // namespace

std::string ContractionPattern::notation() const {
    std::ostringstream out;
    const auto groups = label_groups(*this);
    std::size_t i = 0;
    while (i < factors.size()) {
        std::size_t j = i;
        while (j < factors.size() && factors[j] == factors[i]) ++j;
        out << factors[i].name();
        if (j - i > 1) out << "^" << (j - i);
        i = j;
    }
    for (const auto& g : groups) {
        out << "(";
        for (std::size_t k = 0; k < g.size(); ++k) out << (k ? "," : "") << g[k];
        out << ")";
    }
    if (groups.empty()) out << "()";
    return out.str();
}

ContractionPattern pattern_from_groups(std::vector<TensorSymbol> factors,
                                       const std::vector<std::vector<int>>& groups) {
    std::map<int, std::vector<int>> positions; // label -> positions
    int pos = 1;
    for (const auto& g : groups)
        for (int label : g) positions[label].push_back(pos++);
    ContractionPattern p;
    p.factors = std::move(factors);
    for (const auto& [label, ps] : positions) {
        if (ps.size() != 2)
            throw PairingNotPerfect("label " + std::to_string(label) + " appears " +
                                    std::to_string(ps.size()) + " times");
        p.pairing.pairs.push_back({ps[0], ps[1]});
    }
    return p;
}

bool PatternGraph::connected() const {
    const std::size_t n = nodes.size();
    if (n <= 1) return true;
    std::vector<int> root(n);
    std::iota(root.begin(), root.end(), 0);
    auto find = [&](int x) {
        while (root[x] != x) x = root[x] = root[root[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (adj[i][j] > 0) root[find((int)i)] = find((int)j);
    const int r = find(0);
    for (std::size_t i = 1; i < n; ++i)
        if (find((int)i) != r) return false;
    return true;
}

PatternGraph graph_of(const ContractionPattern& p) {
    PatternGraph g;
    g.nodes = p.factors;
    const std::size_t n = p.factors.size();
    g.adj.assign(n, std::vector<int>(n, 0));
    std::vector<int> factor_of(1, -1);
    for (std::size_t i = 0; i < n; ++i)
        for (int k = 0; k < p.factors[i].rank; ++k) factor_of.push_back((int)i);
    for (const auto& [a, b] : p.pairing.pairs) {
        const int fa = factor_of.at(a), fb = factor_of.at(b);
        g.adj[fa][fb]++;
        if (fa != fb) g.adj[fb][fa]++;
    }
    return g;
}

namespace {

struct CanonState {
    const PatternGraph& g;
    std::vector<int> group_of;   // position -> label group
    std::vector<int> perm;       // canonical position -> original node
    std::vector<bool> used;
    std::vector<int> best;       // best full row sequence found
    std::vector<int> current;    // current row sequence
    bool have_best = false;

    explicit CanonState(const PatternGraph& graph) : g(graph) {}

    void search(std::size_t pos, bool tight) {
        const std::size_t n = g.nodes.size();
        if (pos == n) {
            if (!have_best || current < best) {
                best = current;
                have_best = true;
            }
            return;
        }
        const std::size_t row_start = current.size();
        for (std::size_t u = 0; u < n; ++u) {
            if (used[u] || group_of[u] != group_of_pos(pos)) continue;
            current.resize(row_start);
            for (std::size_t j = 0; j < pos; ++j)
                current.push_back(g.adj[u][perm[j]]);
            current.push_back(g.adj[u][u]);
            bool next_tight = tight;
            if (tight && have_best) {
                // Compare this row against best's corresponding segment.
                int cmp = 0;
                for (std::size_t k = row_start; k < current.size(); ++k) {
                    if (current[k] != best[k]) {
                        cmp = current[k] < best[k] ? -1 : 1;
                        break;
                    }
                }
                if (cmp > 0) continue;
                if (cmp < 0) next_tight = false;
            }
            used[u] = true;
            perm[pos] = (int)u;
            search(pos + 1, next_tight);
            used[u] = false;
        }
        current.resize(row_start);
    }

    int group_of_pos(std::size_t pos) const { return group_of_pos_table[pos]; }
    std::vector<int> group_of_pos_table;
};

} // namespace

std::string canonical_form(const PatternGraph& g) {
    const std::size_t n = g.nodes.size();
    if (n > 12) throw TooManyNodes("canonical form limited to 12 nodes, got " + std::to_string(n));

    // Nodes must already be grouped by label for positions to map to groups;
    // sort a copy if not.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return g.nodes[a] < g.nodes[b]; });
    PatternGraph sorted;
    sorted.nodes.reserve(n);
    sorted.adj.assign(n, std::vector<int>(n, 0));
    for (std::size_t i = 0; i < n; ++i) sorted.nodes.push_back(g.nodes[order[i]]);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) sorted.adj[i][j] = g.adj[order[i]][order[j]];

    CanonState st(sorted);
    st.group_of.assign(n, 0);
    for (std::size_t i = 1; i < n; ++i)
        st.group_of[i] = st.group_of[i - 1] + (sorted.nodes[i] == sorted.nodes[i - 1] ? 0 : 1);
    st.group_of_pos_table = st.group_of;
    st.perm.assign(n, -1);
    st.used.assign(n, false);
    st.search(0, true);

    std::ostringstream key;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = sorted.nodes[i];
        key << (s.kind == TensorSymbol::Kind::moment ? 'M' : 'H') << s.order << '.' << s.rank
            << ';';
    }
    key << '|';
    for (int v : st.best) key << v << ',';
    return key.str();
}

std::string canonical_form(const ContractionPattern& p) {
    return canonical_form(graph_of(p));
}

std::string to_dot(const ContractionPattern& p) {
    const PatternGraph g = graph_of(p);
    std::ostringstream out;
    out << "graph invariant {\n";
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        out << "  n" << i << " [label=\"" << g.nodes[i].order << "\"];\n";
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        for (std::size_t j = i + 1; j < g.nodes.size(); ++j)
            if (g.adj[i][j] > 0)
                out << "  n" << i << " -- n" << j << " [label=\"" << g.adj[i][j] << "\"];\n";
    out << "}\n";
    return out.str();
}

namespace {

// Builds the representative pairing of an edge matrix: traces first per node,
// then cross edges in ascending node order, always consuming the lowest free
// positions. Reproduces the paper's chain-style labels.
ContractionPattern pattern_from_matrix(const std::vector<TensorSymbol>& nodes,
                                       const std::vector<std::vector<int>>& adj) {
    const std::size_t n = nodes.size();
    std::vector<std::vector<int>> free_pos(n);
    int pos = 1;
    for (std::size_t i = 0; i < n; ++i)
        for (int k = 0; k < nodes[i].rank; ++k) free_pos[i].push_back(pos++);
    auto take = [&](std::size_t i) {
        const int p = free_pos[i].front();
        free_pos[i].erase(free_pos[i].begin());
        return p;
    };
    ContractionPattern p;
    p.factors = nodes;
    for (std::size_t i = 0; i < n; ++i) {
        for (int k = 0; k < adj[i][i]; ++k) {
            const int a = take(i), b = take(i);
            p.pairing.pairs.push_back({a, b});
        }
        for (std::size_t j = i + 1; j < n; ++j)
            for (int k = 0; k < adj[i][j]; ++k) {
                const int a = take(i), b = take(j);
                p.pairing.pairs.push_back({a, b});
            }
    }
    return p;
}

struct MatchingDfs {
    const std::vector<TensorSymbol>& nodes;
    bool allow_loops;
    bool connected_only;
    const std::function<bool(const ContractionPattern&)>& visit;
    std::vector<int> rem;
    std::vector<std::vector<int>> adj;
    std::unordered_set<std::string> seen;
    bool stopped = false;

    MatchingDfs(const std::vector<TensorSymbol>& ns, bool loops, bool conn,
                const std::function<bool(const ContractionPattern&)>& v)
        : nodes(ns), allow_loops(loops), connected_only(conn), visit(v) {
        const std::size_t n = ns.size();
        rem.resize(n);
        for (std::size_t i = 0; i < n; ++i) rem[i] = ns[i].rank;
        adj.assign(n, std::vector<int>(n, 0));
    }

    bool feasible() const {
        int sum = 0, mx = 0;
        std::size_t argmax = 0;
        for (std::size_t i = 0; i < rem.size(); ++i) {
            sum += rem[i];
            if (rem[i] > mx) {
                mx = rem[i];
                argmax = i;
            }
        }
        if (sum % 2) return false;
        if (mx <= sum - mx) return true;
        // The excess can only go into self pairs.
        return allow_loops || nodes[argmax].kind == TensorSymbol::Kind::moment;
    }

    void run() { dfs(0, 0); }

    void dfs(std::size_t min_i, std::size_t min_j) {
        if (stopped) return;
        std::size_t i = rem.size();
        for (std::size_t k = 0; k < rem.size(); ++k)
            if (rem[k] > 0) {
                i = k;
                break;
            }
        if (i == rem.size()) {
            emit();
            return;
        }
        const bool loops_here =
            allow_loops || nodes[i].kind == TensorSymbol::Kind::moment;
        std::size_t start = (i == min_i) ? min_j : i;
        if (start < i) start = i;
        for (std::size_t j = start; j < rem.size(); ++j) {
            if (stopped) return;
            if (j == i) {
                if (!loops_here || rem[i] < 2) continue;
                rem[i] -= 2;
                adj[i][i] += 1;
                if (feasible()) dfs(i, j);
                rem[i] += 2;
                adj[i][i] -= 1;
            } else if (rem[j] > 0) {
                rem[i]--;
                rem[j]--;
                adj[i][j]++;
                adj[j][i]++;
                if (feasible()) dfs(i, j);
                rem[i]++;
                rem[j]++;
                adj[i][j]--;
                adj[j][i]--;
            }
        }
    }

    void emit() {
        PatternGraph g;
        g.nodes = nodes;
        g.adj = adj;
        if (connected_only && !g.connected()) return;
        std::string key = canonical_form(g);
        if (!seen.insert(std::move(key)).second) return;
        if (!visit(pattern_from_matrix(nodes, adj))) stopped = true;
    }
};

} // namespace

void for_each_matching_class(const std::vector<TensorSymbol>& factors, bool allow_loops,
                             bool connected_only,
                             const std::function<bool(const ContractionPattern&)>& visit) {
    std::vector<TensorSymbol> nodes = factors;
    std::sort(nodes.begin(), nodes.end());
    int total = 0;
    for (const auto& f : nodes) total += f.rank;
    if (total % 2 != 0) return;
    MatchingDfs dfs(nodes, allow_loops, connected_only, visit);
    dfs.run();
}

std::vector<ContractionPattern> enumerate_patterns(const std::vector<TensorSymbol>& symbols,
                                                   int max_factors, int max_total_rank) {
    // Distinct symbols, sorted.
    std::vector<TensorSymbol> distinct = symbols;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    // All factor-count vectors with at least one factor.
    struct Multiset {
        std::vector<TensorSymbol> nodes;
        int rank;
    };
    std::vector<Multiset> multisets;
    std::vector<int> counts(distinct.size(), 0);
    std::function<void(std::size_t, int, int)> gen = [&](std::size_t k, int nfac, int rank) {
        if (k == distinct.size()) {
            if (nfac == 0 || rank % 2 != 0) return;
            Multiset m;
            m.rank = rank;
            for (std::size_t s = 0; s < distinct.size(); ++s)
                for (int c = 0; c < counts[s]; ++c) m.nodes.push_back(distinct[s]);
            multisets.push_back(std::move(m));
            return;
        }
        for (int c = 0; nfac + c <= max_factors; ++c) {
            const int r = rank + c * distinct[k].rank;
            if (r > max_total_rank) break;
            counts[k] = c;
            gen(k + 1, nfac + c, r);
        }
        counts[k] = 0;
    };
    gen(0, 0, 0);
    std::stable_sort(multisets.begin(), multisets.end(), [](const Multiset& a, const Multiset& b) {
        if (a.rank != b.rank) return a.rank < b.rank;
        if (a.nodes.size() != b.nodes.size()) return a.nodes.size() < b.nodes.size();
        return a.nodes < b.nodes;
    });

    std::vector<ContractionPattern> out;
    for (const auto& m : multisets) {
        for_each_matching_class(m.nodes, /*allow_loops=*/true, /*connected_only=*/false,
                                [&](const ContractionPattern& p) {
                                    out.push_back(p);
                                    return true;
                                });
    }
    return out;
}

std::string ContractionPattern::to_json() const {
    nlohmann::json j;
    nlohmann::json fs = nlohmann::json::array();
    for (const auto& f : factors) {
        if (f.kind == TensorSymbol::Kind::moment)
            fs.push_back(nlohmann::json::array({"M", f.order}));
        else
            fs.push_back(nlohmann::json::array({"H", f.order, f.rank}));
    }
    j["factors"] = std::move(fs);
    nlohmann::json ps = nlohmann::json::array();
    for (const auto& [a, b] : pairing.pairs) ps.push_back(nlohmann::json::array({a, b}));
    j["pairing"] = std::move(ps);
    nlohmann::json tags = nlohmann::json::array();
    tags.push_back(pure() ? "pure" : "mixed");
    tags.push_back(homogeneous() ? "homogeneous" : "simultaneous");
    j["tags"] = std::move(tags);
    return j.dump();
}

ContractionPattern ContractionPattern::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    ContractionPattern p;
    for (const auto& f : j.at("factors")) {
        const std::string kind = f.at(0).get<std::string>();
        if (kind == "M")
            p.factors.push_back(TensorSymbol::moment(f.at(1).get<int>()));
        else if (kind == "H")
            p.factors.push_back(TensorSymbol::irreducible(f.at(1).get<int>(), f.at(2).get<int>()));
        else
            throw std::invalid_argument("unknown factor kind: " + kind);
    }
    for (const auto& pr : j.at("pairing"))
        p.pairing.pairs.push_back({pr.at(0).get<int>(), pr.at(1).get<int>()});
    return p;
}

} // namespace momenta
