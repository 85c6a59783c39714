#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace safegp {

// Opcode of every operator across both function sets. The base set is the
// first 13 entries, so a node's function index is valid under either set.
enum class Op : int16_t {
    Add, Sub, Mul, Div, Mean, Eq, Neq, Lt, Lte, Gt, Gte, Min, Max,          // base
    Add3, Mul3, Mean3, Mul10, Div10, Mod, Abs, Log, Sin, Cos, Tan,          // extended
    Sin10, Cos10, Tan10, Min3, Max3, IfLt, IfLte, IfGt, IfGte, Not, Or, And, Xor,
};

inline constexpr int kBaseOpCount = 13;
inline constexpr int kAllOpCount = 37;

// Scalar kernels, shared by the recursive evaluator and the batched one so
// both produce bit-identical doubles (FP contraction is disabled globally).
namespace ops {
inline double add(double x, double y) { return x + y; }
inline double sub(double x, double y) { return x - y; }
inline double mul(double x, double y) { return x * y; }
// Not the usual protected division: x / sqrt(1 + y^2) is total and smooth.
inline double div(double x, double y) { return x / std::sqrt(1.0 + y * y); }
inline double mean(double x, double y) { return (x + y) / 2.0; }
inline double eq(double x, double y) { return x == y ? 1.0 : -1.0; }
inline double neq(double x, double y) { return x != y ? 1.0 : -1.0; }
inline double lt(double x, double y) { return x < y ? 1.0 : -1.0; }
inline double lte(double x, double y) { return x <= y ? 1.0 : -1.0; }
inline double gt(double x, double y) { return x > y ? 1.0 : -1.0; }
inline double gte(double x, double y) { return x >= y ? 1.0 : -1.0; }
inline double min2(double x, double y) { return x < y ? x : y; }
inline double max2(double x, double y) { return x > y ? x : y; }
inline double add3(double x, double y, double z) { return x + y + z; }
inline double mul3(double x, double y, double z) { return x * y * z; }
inline double mean3(double x, double y, double z) { return (x + y + z) / 3.0; }
inline double mul10(double x) { return x * 10.0; }
inline double div10(double x) { return x / 10.0; }
inline double mod(double x, double y) { return y != 0.0 ? std::fmod(x, y) : 0.0; }
inline double abs(double x) { return std::fabs(x); }
inline double log(double x) { return x > 0.0 ? std::log(x) : 0.0; }
inline double sin(double x) { return std::sin(x); }
inline double cos(double x) { return std::cos(x); }
inline double tan(double x) { return std::tan(x); }
inline double sin10(double x) { return std::sin(10.0 * x); }
inline double cos10(double x) { return std::cos(10.0 * x); }
inline double tan10(double x) { return std::tan(10.0 * x); }
inline double min3(double x, double y, double z) { return min2(min2(x, y), z); }
inline double max3(double x, double y, double z) { return max2(max2(x, y), z); }
inline double iflt(double x, double y, double z) { return x < 0.0 ? y : z; }
inline double iflte(double x, double y, double z) { return x <= 0.0 ? y : z; }
inline double ifgt(double x, double y, double z) { return x > 0.0 ? y : z; }
inline double ifgte(double x, double y, double z) { return x >= 0.0 ? y : z; }
inline double not_(double x) { return x < 0.0 ? 1.0 : -1.0; }
inline double or_(double x, double y) { return (x > 0.0 || y > 0.0) ? 1.0 : -1.0; }
inline double and_(double x, double y) { return (x > 0.0 && y > 0.0) ? 1.0 : -1.0; }
inline double xor_(double x, double y) {
    return ((x > 0.0 && y <= 0.0) || (x <= 0.0 && y > 0.0)) ? 1.0 : -1.0;
}
}  // namespace ops

struct FunctionSpec {
    std::string_view name;
    int arity;                        // 1..3
    double (*eval)(const double*);    // total on all finite inputs
};

enum class FunctionSetTag { Base, Extended };

class FunctionSet {
public:
    static const FunctionSet& base();
    static const FunctionSet& extended();
    static const FunctionSet& get(FunctionSetTag tag) {
        return tag == FunctionSetTag::Base ? base() : extended();
    }

    FunctionSetTag tag() const { return tag_; }
    std::span<const FunctionSpec> members() const { return members_; }
    int size() const { return static_cast<int>(members_.size()); }
    const FunctionSpec& member(int i) const { return members_[i]; }

    // Index of a named operator within this set, or nullopt.
    std::optional<int> find(std::string_view name) const;

private:
    FunctionSet(FunctionSetTag tag, std::span<const FunctionSpec> members)
        : tag_(tag), members_(members) {}

    FunctionSetTag tag_;
    std::span<const FunctionSpec> members_;
};

std::string_view to_string(FunctionSetTag tag);
std::optional<FunctionSetTag> function_set_tag_from_string(std::string_view s);

}  // namespace safegp
