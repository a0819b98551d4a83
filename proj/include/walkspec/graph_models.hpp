#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace walkspec {

// d-regular tree T_d.
struct RegularTree {
    int d = 0;

    friend bool operator==(const RegularTree&, const RegularTree&) = default;
};

// Free product K_{m_1+1} * ... * K_{m_r+1}.
struct FreeProductComplete {
    std::vector<int> ms;

    friend bool operator==(const FreeProductComplete&, const FreeProductComplete&) = default;
};

struct GraphModel {
    std::variant<RegularTree, FreeProductComplete> shape;

    static GraphModel tree(int d);
    static GraphModel free_product(std::vector<int> ms);

    bool is_tree() const { return std::holds_alternative<RegularTree>(shape); }
    bool is_free_product() const { return !is_tree(); }

    // Regular degree: d for trees, m = sum m_i for free products.
    int degree() const;
    // Number of vertex types away from the root: 1 for trees, r for free products.
    int type_count() const;
    // m_i for free products (1-based type), d-1 for trees.
    int factor_size(int type) const;
    const std::vector<int>& ms() const;
    int tree_degree() const;

    // K_2 * K_2, the two-sided line. Accepted for kernel/DP sanity checks only.
    bool is_degenerate_line() const;
    bool is_two_factor() const { return is_free_product() && ms().size() == 2; }

    // Canonical CLI syntax: "tree:d=4" or "free:2,1".
    std::string to_string() const;

    friend bool operator==(const GraphModel&, const GraphModel&) = default;
};

// Returns the model iff every invariant holds; throws InvalidModel otherwise.
GraphModel validate_model(const GraphModel& model);

// Parses "tree:d=4" / "free:2,1". Throws InvalidModel.
GraphModel parse_model(std::string_view text);

// One letter of a word address. Trees use the single pseudo-factor 1 with letters in
// 1..d at the root and 1..d-1 elsewhere.
struct Letter {
    std::int32_t factor = 0;
    std::int32_t letter = 0;

    friend auto operator<=>(const Letter&, const Letter&) = default;
};

struct VertexAddr {
    std::vector<Letter> letters;

    std::size_t level() const { return letters.size(); }
    bool is_root() const { return letters.empty(); }
    // 0 at the root, otherwise the factor of the last letter.
    int type() const { return letters.empty() ? 0 : letters.back().factor; }

    friend auto operator<=>(const VertexAddr&, const VertexAddr&) = default;
};

std::string to_string(const VertexAddr& v);

struct VertexAddrHash {
    std::size_t operator()(const VertexAddr& v) const noexcept;
};

struct LevelDegrees {
    int d_v = 0;
    int d_minus = 0;
    int d_zero = 0;
    int d_plus = 0;

    friend bool operator==(const LevelDegrees&, const LevelDegrees&) = default;
};

// Throws InvalidVertex if v is not a reduced word of the model.
void check_vertex(const GraphModel& model, const VertexAddr& v);

LevelDegrees level_degrees(const GraphModel& model, const VertexAddr& v);

// Degrees of any vertex of the given (level, type) class; level 0 means the root.
LevelDegrees class_degrees(const GraphModel& model, std::size_t level, int type);

struct Neighbor {
    VertexAddr addr;
    int level_delta = 0;
};

// Down-neighbor first, then cell-mates, then children; order is deterministic.
std::vector<Neighbor> neighbors(const GraphModel& model, const VertexAddr& v);

// Number of vertices of each type at levels 0..n. Row k has type_count()+1 entries,
// index 0 used only at level 0.
std::vector<std::vector<double>> class_counts(const GraphModel& model, std::size_t n);

// Sphere sizes M_0..M_n from the class counts.
std::vector<double> sphere_sizes(const GraphModel& model, std::size_t n);

inline constexpr std::size_t kDefaultBallCap = 1'000'000;

struct Ball {
    std::size_t radius = 0;
    std::vector<VertexAddr> vertices;  // BFS order, vertices[0] is the root
    // adjacency[i] lists (vertex index, level delta) restricted to the ball.
    std::vector<std::vector<std::pair<std::size_t, int>>> adjacency;
    std::vector<std::uint64_t> sphere_sizes;
    std::unordered_map<VertexAddr, std::size_t, VertexAddrHash> lookup;

    // Throws InvalidVertex if v is outside the ball.
    std::size_t index_of(const VertexAddr& v) const;
};

// Complete induced subgraph on B(n). Throws BallTooLarge beyond cap vertices.
Ball enumerate_ball(const GraphModel& model, std::size_t n, std::size_t cap = kDefaultBallCap);

}  // namespace walkspec
