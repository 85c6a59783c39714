#include "safegp/tree.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <sstream>

namespace safegp {

namespace {

// Probability that grow construction places a terminal once the minimum
// depth has been reached.
constexpr double kGrowTerminalProb = 0.5;

int compute_depth(std::span<const TreeNode> nodes) {
    int max_depth = 0;
    std::vector<int> remaining;  // child slots left per open level
    for (const TreeNode& n : nodes) {
        max_depth = std::max(max_depth, static_cast<int>(remaining.size()));
        if (n.arity > 0) {
            remaining.push_back(n.arity);
        } else {
            while (!remaining.empty() && --remaining.back() == 0) remaining.pop_back();
        }
    }
    return max_depth;
}

void validate_structure(const FunctionSet& fset, const std::vector<TreeNode>& nodes) {
    if (nodes.empty()) throw std::invalid_argument("tree: empty node list");
    long open = 1;  // slots still to fill
    for (const TreeNode& n : nodes) {
        if (open <= 0) throw std::invalid_argument("tree: trailing nodes after root subtree");
        if (n.is_leaf()) {
            if (n.feature < 0) throw std::invalid_argument("tree: leaf with negative feature");
        } else {
            if (n.function < 0 || n.function >= fset.size())
                throw std::invalid_argument("tree: function index outside bound set");
            if (fset.member(n.function).arity != n.arity)
                throw std::invalid_argument("tree: node arity disagrees with function");
        }
        open += n.arity - 1;
    }
    if (open != 0) throw std::invalid_argument("tree: incomplete node list");
}

}  // namespace

FeatureSchema::FeatureSchema(std::vector<std::string> names) : names_(std::move(names)) {
    index_.reserve(names_.size());
    for (size_t i = 0; i < names_.size(); ++i) {
        if (!index_.emplace(names_[i], static_cast<int>(i)).second)
            throw std::invalid_argument("schema: duplicate feature name " + names_[i]);
    }
}

int FeatureSchema::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    return it == index_.end() ? -1 : it->second;
}

ModelTree::ModelTree(const FunctionSet& fset, std::vector<TreeNode> nodes)
    : fset_(&fset), nodes_(std::move(nodes)) {
    validate_structure(fset, nodes_);
    depth_ = compute_depth(nodes_);
    max_feature_ = -1;
    for (const TreeNode& n : nodes_)
        if (n.is_leaf()) max_feature_ = std::max(max_feature_, n.feature);
}

int ModelTree::subtree_end(int pos) const {
    int need = 1;
    int i = pos;
    while (need > 0) {
        need += nodes_[i].arity - 1;
        ++i;
    }
    return i;
}

namespace {

double eval_rec(const ModelTree& tree, size_t& pos, std::span<const double> sample) {
    const TreeNode& n = tree.nodes()[pos++];
    if (n.is_leaf()) {
        if (static_cast<size_t>(n.feature) >= sample.size())
            throw std::out_of_range("eval_tree: feature index " + std::to_string(n.feature) +
                                    " outside sample of length " + std::to_string(sample.size()));
        return sample[n.feature];
    }
    double args[3];
    for (int i = 0; i < n.arity; ++i) args[i] = eval_rec(tree, pos, sample);
    return tree.function_set().member(n.function).eval(args);
}

}  // namespace

double eval_tree(const ModelTree& tree, std::span<const double> sample) {
    size_t pos = 0;
    return eval_rec(tree, pos, sample);
}

int classify(const ModelTree& tree, std::span<const double> sample) {
    return eval_tree(tree, sample) > 0.0 ? 1 : 0;
}

bool uses_all_features(const ModelTree& tree, std::span<const int> required) {
    for (int f : required) {
        bool found = false;
        for (const TreeNode& n : tree.nodes()) {
            if (n.is_leaf() && n.feature == f) {
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

namespace {

// Appends a subtree in preorder. Grow places terminals anywhere at or below
// min_depth (by coin flip) and always at target_depth; full places functions
// everywhere above target_depth.
void build_subtree(std::vector<TreeNode>& out, int depth, int target_depth, int min_depth,
                   bool full, int n_features, const FunctionSet& fset, Rng& rng) {
    const bool at_bottom = depth >= target_depth;
    const bool may_stop = depth >= min_depth;
    const bool terminal =
        at_bottom || (!full && may_stop && rng.bernoulli(kGrowTerminalProb));
    if (terminal) {
        out.push_back(TreeNode::leaf(static_cast<int>(rng.index(n_features))));
        return;
    }
    const int fn = static_cast<int>(rng.index(fset.size()));
    const int arity = fset.member(fn).arity;
    out.push_back(TreeNode::internal(fn, arity));
    for (int c = 0; c < arity; ++c)
        build_subtree(out, depth + 1, target_depth, min_depth, full, n_features, fset, rng);
}

ModelTree make_tree(int target_depth, int min_depth, bool full, int n_features,
                    const FunctionSet& fset, Rng& rng) {
    std::vector<TreeNode> nodes;
    build_subtree(nodes, 0, target_depth, min_depth, full, n_features, fset, rng);
    return ModelTree(fset, std::move(nodes));
}

}  // namespace

std::vector<ModelTree> ramped_half_and_half(int count, int depth_min, int depth_max,
                                            int n_features, const FunctionSet& fset, Rng& rng) {
    if (count < 1) throw std::invalid_argument("ramped_half_and_half: count must be >= 1");
    if (depth_min < 1 || depth_min > depth_max)
        throw std::invalid_argument("ramped_half_and_half: bad depth range");
    if (n_features < 1) throw std::invalid_argument("ramped_half_and_half: empty schema");
    if (fset.size() == 0) throw std::invalid_argument("ramped_half_and_half: empty function set");

    const int span = depth_max - depth_min + 1;
    std::vector<ModelTree> trees;
    trees.reserve(count);
    for (int i = 0; i < count; ++i) {
        const int target = depth_min + (i / 2) % span;
        const bool full = (i % 2) == 0;
        trees.push_back(make_tree(target, depth_min, full, n_features, fset, rng));
    }
    return trees;
}

namespace {

std::vector<TreeNode> splice(const ModelTree& host, int at, std::span<const TreeNode> graft) {
    const int end = host.subtree_end(at);
    std::vector<TreeNode> nodes;
    nodes.reserve(host.size() - (end - at) + graft.size());
    auto src = host.nodes();
    nodes.insert(nodes.end(), src.begin(), src.begin() + at);
    nodes.insert(nodes.end(), graft.begin(), graft.end());
    nodes.insert(nodes.end(), src.begin() + end, src.end());
    return nodes;
}

}  // namespace

std::pair<ModelTree, ModelTree> subtree_crossover(const ModelTree& a, const ModelTree& b,
                                                  int max_depth, Rng& rng) {
    assert(a.function_set().tag() == b.function_set().tag());
    const int i = static_cast<int>(rng.index(a.size()));
    const int j = static_cast<int>(rng.index(b.size()));
    auto sub_a = a.nodes().subspan(i, a.subtree_end(i) - i);
    auto sub_b = b.nodes().subspan(j, b.subtree_end(j) - j);

    ModelTree child_a(a.function_set(), splice(a, i, sub_b));
    ModelTree child_b(b.function_set(), splice(b, j, sub_a));
    if (child_a.depth() > max_depth) child_a = a;
    if (child_b.depth() > max_depth) child_b = b;
    return {std::move(child_a), std::move(child_b)};
}

ModelTree subtree_mutation(const ModelTree& tree, int max_depth, int subtree_depth_cap,
                           int n_features, Rng& rng) {
    const int at = static_cast<int>(rng.index(tree.size()));
    std::vector<TreeNode> graft;
    build_subtree(graft, 0, subtree_depth_cap, 0, /*full=*/false, n_features,
                  tree.function_set(), rng);
    ModelTree child(tree.function_set(), splice(tree, at, graft));
    if (child.depth() > max_depth) return tree;
    return child;
}

namespace {

void serialize_rec(const ModelTree& tree, size_t& pos, const FeatureSchema& schema,
                   std::string& out) {
    const TreeNode& n = tree.nodes()[pos++];
    if (n.is_leaf()) {
        out += schema.name(n.feature);
        return;
    }
    out += '(';
    out += tree.function_set().member(n.function).name;
    for (int i = 0; i < n.arity; ++i) {
        out += ' ';
        serialize_rec(tree, pos, schema, out);
    }
    out += ')';
}

struct Tokenizer {
    std::string_view text;
    size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= text.size();
    }
    // Returns "(", ")" or a symbol; sets start to the token position.
    std::string_view next(size_t& start) {
        skip_ws();
        if (pos >= text.size()) throw TreeParseError("unexpected end of input", pos);
        start = pos;
        const char c = text[pos];
        if (c == '(' || c == ')') {
            ++pos;
            return text.substr(start, 1);
        }
        size_t end = pos;
        while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end])) &&
               text[end] != '(' && text[end] != ')')
            ++end;
        std::string_view tok = text.substr(start, end - start);
        pos = end;
        return tok;
    }
};

void parse_rec(Tokenizer& tz, const FeatureSchema& schema, const FunctionSet& fset,
               std::vector<TreeNode>& out) {
    size_t start = 0;
    std::string_view tok = tz.next(start);
    if (tok == ")") throw TreeParseError("unexpected ')'", start);
    if (tok == "(") {
        size_t name_at = 0;
        std::string_view name = tz.next(name_at);
        if (name == "(" || name == ")")
            throw TreeParseError("expected function name after '('", name_at);
        auto fn = fset.find(name);
        if (!fn) throw TreeParseError("unknown function '" + std::string(name) + "'", name_at);
        const int arity = fset.member(*fn).arity;
        out.push_back(TreeNode::internal(*fn, arity));
        for (int i = 0; i < arity; ++i) {
            tz.skip_ws();
            if (tz.pos < tz.text.size() && tz.text[tz.pos] == ')')
                throw TreeParseError("too few arguments for '" + std::string(name) + "'", tz.pos);
            parse_rec(tz, schema, fset, out);
        }
        size_t close_at = 0;
        std::string_view close = tz.next(close_at);
        if (close != ")")
            throw TreeParseError("too many arguments for '" + std::string(name) + "'", close_at);
        return;
    }
    const int feature = schema.find(tok);
    if (feature < 0) throw TreeParseError("unknown terminal '" + std::string(tok) + "'", start);
    out.push_back(TreeNode::leaf(feature));
}

}  // namespace

std::string serialize_tree(const ModelTree& tree, const FeatureSchema& schema) {
    std::string out;
    size_t pos = 0;
    serialize_rec(tree, pos, schema, out);
    return out;
}

ModelTree parse_tree(std::string_view text, const FeatureSchema& schema, const FunctionSet& fset) {
    Tokenizer tz{text};
    std::vector<TreeNode> nodes;
    parse_rec(tz, schema, fset, nodes);
    if (!tz.done()) throw TreeParseError("trailing input after tree", tz.pos);
    return ModelTree(fset, std::move(nodes));
}

BatchTreeEvaluator::BatchTreeEvaluator(const double* columns, int n_rows, int n_cols)
    : cols_(columns), n_rows_(n_rows), n_cols_(n_cols) {}

double* BatchTreeEvaluator::slot(int i) { return slots_[i].data(); }

namespace {

template <typename F>
inline void apply1(int n, const double* a, double* o, F f) {
    for (int r = 0; r < n; ++r) o[r] = f(a[r]);
}
template <typename F>
inline void apply2(int n, const double* a, const double* b, double* o, F f) {
    for (int r = 0; r < n; ++r) o[r] = f(a[r], b[r]);
}
template <typename F>
inline void apply3(int n, const double* a, const double* b, const double* c, double* o, F f) {
    for (int r = 0; r < n; ++r) o[r] = f(a[r], b[r], c[r]);
}

}  // namespace

const double* BatchTreeEvaluator::acquire_and_eval(std::span<const TreeNode> nodes, size_t& pos) {
    const TreeNode n = nodes[pos++];
    if (n.is_leaf()) {
        if (n.feature >= n_cols_)
            throw std::out_of_range("batch eval: feature index outside matrix");
        return cols_ + static_cast<size_t>(n.feature) * n_rows_;
    }
    const int out_slot = top_++;
    if (out_slot == static_cast<int>(slots_.size())) slots_.emplace_back(n_rows_);
    const double* child[3] = {nullptr, nullptr, nullptr};
    for (int i = 0; i < n.arity; ++i) child[i] = acquire_and_eval(nodes, pos);
    double* out = slot(out_slot);
    const int nr = n_rows_;
    const double *c0 = child[0], *c1 = child[1], *c2 = child[2];

    using namespace ops;
    switch (static_cast<Op>(n.function)) {
        case Op::Add:   apply2(nr, c0, c1, out, [](double x, double y) { return add(x, y); }); break;
        case Op::Sub:   apply2(nr, c0, c1, out, [](double x, double y) { return sub(x, y); }); break;
        case Op::Mul:   apply2(nr, c0, c1, out, [](double x, double y) { return mul(x, y); }); break;
        case Op::Div:   apply2(nr, c0, c1, out, [](double x, double y) { return div(x, y); }); break;
        case Op::Mean:  apply2(nr, c0, c1, out, [](double x, double y) { return mean(x, y); }); break;
        case Op::Eq:    apply2(nr, c0, c1, out, [](double x, double y) { return eq(x, y); }); break;
        case Op::Neq:   apply2(nr, c0, c1, out, [](double x, double y) { return neq(x, y); }); break;
        case Op::Lt:    apply2(nr, c0, c1, out, [](double x, double y) { return lt(x, y); }); break;
        case Op::Lte:   apply2(nr, c0, c1, out, [](double x, double y) { return lte(x, y); }); break;
        case Op::Gt:    apply2(nr, c0, c1, out, [](double x, double y) { return gt(x, y); }); break;
        case Op::Gte:   apply2(nr, c0, c1, out, [](double x, double y) { return gte(x, y); }); break;
        case Op::Min:   apply2(nr, c0, c1, out, [](double x, double y) { return min2(x, y); }); break;
        case Op::Max:   apply2(nr, c0, c1, out, [](double x, double y) { return max2(x, y); }); break;
        case Op::Add3:  apply3(nr, c0, c1, c2, out, [](double x, double y, double z) { return add3(x, y, z); }); break;
        case Op::Mul3:  apply3(nr, c0, c1, c2, out, [](double x, double y, double z) { return mul3(x, y, z); }); break;
        case Op::Mean3: apply3(nr, c0, c1, c2, out, [](double x, double y, double z) { return mean3(x, y, z); }); break;
        case Op::Mul10: apply1(nr, c0, out, [](double x) { return mul10(x); }); break;
        case Op::Div10: apply1(nr, c0, out, [](double x) { return div10(x); }); break;
        case Op::Mod:   apply2(nr, c0, c1, out, [](double x, double y) { return mod(x, y); }); break;
        case Op::Abs:   apply1(nr, c0, out, [](double x) { return ops::abs(x); }); break;
        case Op::Log:   apply1(nr, c0, out, [](double x) { return ops::log(x); }); break;
        case Op::Sin:   apply1(nr, c0, out, [](double x) { return ops::sin(x); }); break;
        case Op::Cos:   apply1(nr, c0, out, [](double x) { return ops::cos(x); }); break;
        case Op::Tan:   apply1(nr, c0, out, [](double x) { return ops::tan(x); }); break;
        case Op::Sin10: apply1(nr, c0, out, [](double x) { return sin10(x); }); break;
        case Op::Cos10: apply1(nr, c0, out, [](double x) { return cos10(x); }); break;
        case Op::Tan10: apply1(nr, c0, out, [](double x) { return tan10(x); }); break;
        case Op::Min3:  apply3(nr, c0, c1, c2, out, [](double x, double y, double z) { return min3(x, y, z); }); break;
        case Op::Max3:  apply3(nr, c0, c1, c2, out, [](double x, double y, double z) { return max3(x, y, z); }); break;
        case Op::IfLt:  apply3(nr, c0, c1, c2, out, [](double x, double y, double z) { return iflt(x, y, z); }); break;
        case Op::IfLte: apply3(nr, c0, c1, c2, out, [](double x, double y, double z) { return iflte(x, y, z); }); break;
        case Op::IfGt:  apply3(nr, c0, c1, c2, out, [](double x, double y, double z) { return ifgt(x, y, z); }); break;
        case Op::IfGte: apply3(nr, c0, c1, c2, out, [](double x, double y, double z) { return ifgte(x, y, z); }); break;
        case Op::Not:   apply1(nr, c0, out, [](double x) { return not_(x); }); break;
        case Op::Or:    apply2(nr, c0, c1, out, [](double x, double y) { return or_(x, y); }); break;
        case Op::And:   apply2(nr, c0, c1, out, [](double x, double y) { return and_(x, y); }); break;
        case Op::Xor:   apply2(nr, c0, c1, out, [](double x, double y) { return xor_(x, y); }); break;
    }
    top_ = out_slot + 1;  // release child slots
    return out;
}

void BatchTreeEvaluator::eval(const ModelTree& tree, double* out) {
    top_ = 0;
    size_t pos = 0;
    const double* result = acquire_and_eval(tree.nodes(), pos);
    std::copy(result, result + n_rows_, out);
    top_ = 0;
}

}  // namespace safegp
