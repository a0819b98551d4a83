#include "walkspec/graph_models.hpp"

#include <charconv>
#include <numeric>
#include <sstream>

#include "walkspec/error.hpp"

namespace walkspec {

namespace {

[[noreturn]] void invalid_model(const std::string& what) { throw Error(ErrorKind::InvalidModel, what); }

[[noreturn]] void invalid_vertex(const VertexAddr& v, const std::string& what) {
    throw Error(ErrorKind::InvalidVertex, to_string(v) + ": " + what);
}

int parse_int(std::string_view s, std::string_view context) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        invalid_model("cannot parse integer '" + std::string(s) + "' in '" + std::string(context) + "'");
    }
    return value;
}

}  // namespace

GraphModel GraphModel::tree(int d) { return validate_model(GraphModel{RegularTree{d}}); }

GraphModel GraphModel::free_product(std::vector<int> ms) {
    return validate_model(GraphModel{FreeProductComplete{std::move(ms)}});
}

int GraphModel::degree() const {
    if (is_tree()) return std::get<RegularTree>(shape).d;
    const auto& v = ms();
    return std::accumulate(v.begin(), v.end(), 0);
}

int GraphModel::type_count() const { return is_tree() ? 1 : static_cast<int>(ms().size()); }

int GraphModel::factor_size(int type) const {
    if (is_tree()) return tree_degree() - 1;
    return ms().at(static_cast<std::size_t>(type - 1));
}

const std::vector<int>& GraphModel::ms() const { return std::get<FreeProductComplete>(shape).ms; }

int GraphModel::tree_degree() const { return std::get<RegularTree>(shape).d; }

bool GraphModel::is_degenerate_line() const {
    return is_free_product() && ms().size() == 2 && ms()[0] == 1 && ms()[1] == 1;
}

std::string GraphModel::to_string() const {
    if (is_tree()) return "tree:d=" + std::to_string(tree_degree());
    std::string out = "free:";
    for (std::size_t i = 0; i < ms().size(); ++i) {
        if (i) out += ',';
        out += std::to_string(ms()[i]);
    }
    return out;
}

GraphModel validate_model(const GraphModel& model) {
    if (model.is_tree()) {
        if (model.tree_degree() < 2) invalid_model("regular tree needs d >= 2, got d=" + std::to_string(model.tree_degree()));
        return model;
    }
    const auto& ms = model.ms();
    if (ms.size() < 2) invalid_model("free product needs r >= 2 factors, got r=" + std::to_string(ms.size()));
    for (int m : ms) {
        if (m < 1) invalid_model("free product factor sizes must be m_i >= 1, got " + std::to_string(m));
    }
    return model;
}

GraphModel parse_model(std::string_view text) {
    const std::string context(text);
    if (text.starts_with("tree:")) {
        auto rest = text.substr(5);
        if (!rest.starts_with("d=")) invalid_model("expected 'tree:d=<int>', got '" + context + "'");
        return GraphModel::tree(parse_int(rest.substr(2), context));
    }
    if (text.starts_with("free:")) {
        auto rest = text.substr(5);
        std::vector<int> ms;
        while (true) {
            auto comma = rest.find(',');
            ms.push_back(parse_int(rest.substr(0, comma), context));
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
        return GraphModel::free_product(std::move(ms));
    }
    invalid_model("unknown model syntax '" + context + "' (expected tree:d=N or free:m1,m2,...)");
}

std::string to_string(const VertexAddr& v) {
    if (v.is_root()) return "o";
    std::ostringstream os;
    for (std::size_t i = 0; i < v.letters.size(); ++i) {
        if (i) os << '.';
        os << v.letters[i].factor << ':' << v.letters[i].letter;
    }
    return os.str();
}

std::size_t VertexAddrHash::operator()(const VertexAddr& v) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (const auto& l : v.letters) {
        h ^= static_cast<std::size_t>(l.factor) * 0x9E3779B97F4A7C15ULL + static_cast<std::size_t>(l.letter);
        h *= 0x100000001b3ULL;
    }
    return h;
}

void check_vertex(const GraphModel& model, const VertexAddr& v) {
    for (std::size_t k = 0; k < v.letters.size(); ++k) {
        const auto& l = v.letters[k];
        if (model.is_tree()) {
            const int d = model.tree_degree();
            const int arity = (k == 0) ? d : d - 1;
            if (l.factor != 1) invalid_vertex(v, "tree letters use pseudo-factor 1");
            if (l.letter < 1 || l.letter > arity) invalid_vertex(v, "tree child index out of range");
        } else {
            const int r = static_cast<int>(model.ms().size());
            if (l.factor < 1 || l.factor > r) invalid_vertex(v, "factor index out of range");
            if (l.letter < 1 || l.letter > model.factor_size(l.factor)) invalid_vertex(v, "letter index out of range");
            if (k > 0 && v.letters[k - 1].factor == l.factor) {
                invalid_vertex(v, "consecutive letters share a factor");
            }
        }
    }
}

LevelDegrees class_degrees(const GraphModel& model, std::size_t level, int type) {
    const int d = model.degree();
    if (level == 0) return {d, 0, 0, d};
    if (model.is_tree()) return {d, 1, 0, d - 1};
    const int mi = model.factor_size(type);
    return {d, 1, mi - 1, d - mi};
}

LevelDegrees level_degrees(const GraphModel& model, const VertexAddr& v) {
    check_vertex(model, v);
    return class_degrees(model, v.level(), v.type());
}

std::vector<Neighbor> neighbors(const GraphModel& model, const VertexAddr& v) {
    check_vertex(model, v);
    std::vector<Neighbor> out;
    out.reserve(static_cast<std::size_t>(model.degree()));
    if (!v.is_root()) {
        VertexAddr parent = v;
        parent.letters.pop_back();
        out.push_back({std::move(parent), -1});
    }
    if (model.is_tree()) {
        const int arity = v.is_root() ? model.tree_degree() : model.tree_degree() - 1;
        for (int c = 1; c <= arity; ++c) {
            VertexAddr child = v;
            child.letters.push_back({1, c});
            out.push_back({std::move(child), +1});
        }
        return out;
    }
    const int own = v.type();
    if (!v.is_root()) {
        const Letter last = v.letters.back();
        for (int b = 1; b <= model.factor_size(own); ++b) {
            if (b == last.letter) continue;
            VertexAddr mate = v;
            mate.letters.back().letter = b;
            out.push_back({std::move(mate), 0});
        }
    }
    const int r = static_cast<int>(model.ms().size());
    for (int j = 1; j <= r; ++j) {
        if (j == own) continue;
        for (int b = 1; b <= model.factor_size(j); ++b) {
            VertexAddr child = v;
            child.letters.push_back({j, b});
            out.push_back({std::move(child), +1});
        }
    }
    return out;
}

std::vector<std::vector<double>> class_counts(const GraphModel& model, std::size_t n) {
    const int types = model.type_count();
    std::vector<std::vector<double>> counts(n + 1, std::vector<double>(static_cast<std::size_t>(types) + 1, 0.0));
    counts[0][0] = 1.0;
    if (n == 0) return counts;
    for (int i = 1; i <= types; ++i) {
        counts[1][static_cast<std::size_t>(i)] = model.is_tree() ? model.tree_degree() : model.factor_size(i);
    }
    for (std::size_t k = 1; k < n; ++k) {
        double total = 0.0;
        for (int i = 1; i <= types; ++i) total += counts[k][static_cast<std::size_t>(i)];
        for (int j = 1; j <= types; ++j) {
            const double from = model.is_tree() ? total : total - counts[k][static_cast<std::size_t>(j)];
            counts[k + 1][static_cast<std::size_t>(j)] = from * model.factor_size(j);
        }
    }
    return counts;
}

std::vector<double> sphere_sizes(const GraphModel& model, std::size_t n) {
    const auto counts = class_counts(model, n);
    std::vector<double> out(n + 1, 0.0);
    for (std::size_t k = 0; k <= n; ++k) out[k] = std::accumulate(counts[k].begin(), counts[k].end(), 0.0);
    return out;
}

std::size_t Ball::index_of(const VertexAddr& v) const {
    auto it = lookup.find(v);
    if (it == lookup.end()) throw Error(ErrorKind::InvalidVertex, to_string(v) + " is outside the ball");
    return it->second;
}

Ball enumerate_ball(const GraphModel& model, std::size_t n, std::size_t cap) {
    const auto sizes = sphere_sizes(model, n);
    const double total = std::accumulate(sizes.begin(), sizes.end(), 0.0);
    if (total > static_cast<double>(cap)) {
        throw Error(ErrorKind::BallTooLarge, "B(" + std::to_string(n) + ") of " + model.to_string() + " has " +
                                                 std::to_string(static_cast<long double>(total)) + " vertices, cap " +
                                                 std::to_string(cap));
    }
    Ball ball;
    ball.radius = n;
    ball.vertices.reserve(static_cast<std::size_t>(total));
    ball.vertices.push_back(VertexAddr{});
    ball.lookup.emplace(VertexAddr{}, 0);
    ball.sphere_sizes.assign(n + 1, 0);
    ball.sphere_sizes[0] = 1;

    std::vector<std::vector<Neighbor>> nbrs;
    nbrs.reserve(static_cast<std::size_t>(total));
    for (std::size_t i = 0; i < ball.vertices.size(); ++i) {
        nbrs.push_back(neighbors(model, ball.vertices[i]));
        if (ball.vertices[i].level() == n) continue;
        for (const auto& nb : nbrs.back()) {
            if (nb.level_delta != 1) continue;
            ball.lookup.emplace(nb.addr, ball.vertices.size());
            ++ball.sphere_sizes[nb.addr.level()];
            ball.vertices.push_back(nb.addr);
        }
    }
    ball.adjacency.resize(ball.vertices.size());
    for (std::size_t i = 0; i < ball.vertices.size(); ++i) {
        for (const auto& nb : nbrs[i]) {
            if (nb.addr.level() > n) continue;
            ball.adjacency[i].emplace_back(ball.lookup.at(nb.addr), nb.level_delta);
        }
    }
    return ball;
}

}  // namespace walkspec
