#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "safegp/function_set.hpp"
#include "safegp/rng.hpp"

namespace safegp {

// Column names of a dataset; trees hold feature indices into this.
class FeatureSchema {
public:
    explicit FeatureSchema(std::vector<std::string> names);

    int size() const { return static_cast<int>(names_.size()); }
    const std::string& name(int i) const { return names_.at(i); }
    const std::vector<std::string>& names() const { return names_; }
    int find(std::string_view name) const;  // -1 if absent

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, int> index_;
};

struct TreeNode {
    int16_t function;  // index into the bound FunctionSet, or -1 for a leaf
    int16_t arity;     // 0 for a leaf
    int32_t feature;   // leaf: feature index; internal: -1

    static TreeNode leaf(int feature) { return {-1, 0, feature}; }
    static TreeNode internal(int function, int arity) { return {int16_t(function), int16_t(arity), -1}; }

    bool is_leaf() const { return arity == 0; }
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// A program tree stored as a preorder node sequence. The subtree rooted at
// position i occupies the contiguous range [i, subtree_end(i)). Trees are
// immutable after construction and safe to share across threads; variation
// operators build new trees.
class ModelTree {
public:
    ModelTree(const FunctionSet& fset, std::vector<TreeNode> nodes);

    static ModelTree single_leaf(const FunctionSet& fset, int feature) {
        return ModelTree(fset, {TreeNode::leaf(feature)});
    }

    const FunctionSet& function_set() const { return *fset_; }
    std::span<const TreeNode> nodes() const { return nodes_; }
    int size() const { return static_cast<int>(nodes_.size()); }
    int depth() const { return depth_; }  // single leaf has depth 0
    int subtree_end(int pos) const;       // exclusive
    int max_feature() const { return max_feature_; }

    friend bool operator==(const ModelTree& a, const ModelTree& b) {
        return a.fset_->tag() == b.fset_->tag() && a.nodes_ == b.nodes_;
    }

private:
    const FunctionSet* fset_;
    std::vector<TreeNode> nodes_;
    int depth_;
    int max_feature_;
};

class TreeParseError : public std::runtime_error {
public:
    TreeParseError(const std::string& what, size_t position)
        : std::runtime_error(what + " (at position " + std::to_string(position) + ")"),
          position(position) {}
    size_t position;
};

// Recursive evaluation of one sample; throws std::out_of_range on a feature
// index outside the sample (schema mismatch).
double eval_tree(const ModelTree& tree, std::span<const double> sample);

// Decision rule: positive output is class 1, everything else (including 0
// and NaN) is class 0. Relational operators emit +/-1, making 0 the natural
// boundary.
int classify(const ModelTree& tree, std::span<const double> sample);

inline int tree_size(const ModelTree& tree) { return tree.size(); }

// True iff every index in `required` occurs as a leaf. Empty set is true.
bool uses_all_features(const ModelTree& tree, std::span<const int> required);

// Ramped half-and-half initialization: target depths cycle over
// [depth_min, depth_max], alternating full and grow construction. Every
// returned tree has depth within the range.
std::vector<ModelTree> ramped_half_and_half(int count, int depth_min, int depth_max,
                                            int n_features, const FunctionSet& fset, Rng& rng);

// One uniformly chosen crossover point per parent; subtrees are swapped both
// ways. A child whose depth would exceed max_depth is replaced by its own
// parent unchanged.
std::pair<ModelTree, ModelTree> subtree_crossover(const ModelTree& a, const ModelTree& b,
                                                  int max_depth, Rng& rng);

// Replaces a uniformly chosen subtree with a fresh grow subtree of depth at
// most subtree_depth_cap; the same depth-limit revert rule as crossover.
ModelTree subtree_mutation(const ModelTree& tree, int max_depth, int subtree_depth_cap,
                           int n_features, Rng& rng);

// Parenthesized prefix text, e.g. "(f_add N0 M0P3)"; a lone leaf is just
// its feature name. parse(serialize(t)) is structurally identical to t.
std::string serialize_tree(const ModelTree& tree, const FeatureSchema& schema);
ModelTree parse_tree(std::string_view text, const FeatureSchema& schema, const FunctionSet& fset);

// Evaluates trees over a whole column-major matrix at once; this is the hot
// path of the evolutionary drivers. Results are bit-identical to eval_tree
// per row. The evaluator owns scratch buffers and is reusable across trees
// (one instance per thread).
class BatchTreeEvaluator {
public:
    // columns: column-major n_rows x n_cols matrix, must outlive the evaluator.
    BatchTreeEvaluator(const double* columns, int n_rows, int n_cols);

    void eval(const ModelTree& tree, double* out);  // out[n_rows]
    int n_rows() const { return n_rows_; }

private:
    const double* acquire_and_eval(std::span<const TreeNode> nodes, size_t& pos);
    double* slot(int i);

    const double* cols_;
    int n_rows_, n_cols_;
    std::vector<std::vector<double>> slots_;
    int top_ = 0;
};

}  // namespace safegp
