#include "safegp/function_set.hpp"

#include <array>

namespace safegp {

namespace {

double w_add(const double* a) { return ops::add(a[0], a[1]); }
double w_sub(const double* a) { return ops::sub(a[0], a[1]); }
double w_mul(const double* a) { return ops::mul(a[0], a[1]); }
double w_div(const double* a) { return ops::div(a[0], a[1]); }
double w_mean(const double* a) { return ops::mean(a[0], a[1]); }
double w_eq(const double* a) { return ops::eq(a[0], a[1]); }
double w_neq(const double* a) { return ops::neq(a[0], a[1]); }
double w_lt(const double* a) { return ops::lt(a[0], a[1]); }
double w_lte(const double* a) { return ops::lte(a[0], a[1]); }
double w_gt(const double* a) { return ops::gt(a[0], a[1]); }
double w_gte(const double* a) { return ops::gte(a[0], a[1]); }
double w_min(const double* a) { return ops::min2(a[0], a[1]); }
double w_max(const double* a) { return ops::max2(a[0], a[1]); }
double w_add3(const double* a) { return ops::add3(a[0], a[1], a[2]); }
double w_mul3(const double* a) { return ops::mul3(a[0], a[1], a[2]); }
double w_mean3(const double* a) { return ops::mean3(a[0], a[1], a[2]); }
double w_mul10(const double* a) { return ops::mul10(a[0]); }
double w_div10(const double* a) { return ops::div10(a[0]); }
double w_mod(const double* a) { return ops::mod(a[0], a[1]); }
double w_abs(const double* a) { return ops::abs(a[0]); }
double w_log(const double* a) { return ops::log(a[0]); }
double w_sin(const double* a) { return ops::sin(a[0]); }
double w_cos(const double* a) { return ops::cos(a[0]); }
double w_tan(const double* a) { return ops::tan(a[0]); }
double w_sin10(const double* a) { return ops::sin10(a[0]); }
double w_cos10(const double* a) { return ops::cos10(a[0]); }
double w_tan10(const double* a) { return ops::tan10(a[0]); }
double w_min3(const double* a) { return ops::min3(a[0], a[1], a[2]); }
double w_max3(const double* a) { return ops::max3(a[0], a[1], a[2]); }
double w_iflt(const double* a) { return ops::iflt(a[0], a[1], a[2]); }
double w_iflte(const double* a) { return ops::iflte(a[0], a[1], a[2]); }
double w_ifgt(const double* a) { return ops::ifgt(a[0], a[1], a[2]); }
double w_ifgte(const double* a) { return ops::ifgte(a[0], a[1], a[2]); }
double w_not(const double* a) { return ops::not_(a[0]); }
double w_or(const double* a) { return ops::or_(a[0], a[1]); }
double w_and(const double* a) { return ops::and_(a[0], a[1]); }
double w_xor(const double* a) { return ops::xor_(a[0], a[1]); }

// Order must match enum Op exactly.
constexpr std::array<FunctionSpec, kAllOpCount> kSpecs = {{
    {"f_add", 2, w_add},     {"f_sub", 2, w_sub},     {"f_mul", 2, w_mul},
    {"f_div", 2, w_div},     {"f_mean", 2, w_mean},   {"f_eq", 2, w_eq},
    {"f_neq", 2, w_neq},     {"f_lt", 2, w_lt},       {"f_lte", 2, w_lte},
    {"f_gt", 2, w_gt},       {"f_gte", 2, w_gte},     {"f_min", 2, w_min},
    {"f_max", 2, w_max},     {"f_add3", 3, w_add3},   {"f_mul3", 3, w_mul3},
    {"f_mean3", 3, w_mean3}, {"f_mul10", 1, w_mul10}, {"f_div10", 1, w_div10},
    {"f_mod", 2, w_mod},     {"f_abs", 1, w_abs},     {"f_log", 1, w_log},
    {"f_sin", 1, w_sin},     {"f_cos", 1, w_cos},     {"f_tan", 1, w_tan},
    {"f_sin10", 1, w_sin10}, {"f_cos10", 1, w_cos10}, {"f_tan10", 1, w_tan10},
    {"f_min3", 3, w_min3},   {"f_max3", 3, w_max3},   {"f_iflt", 3, w_iflt},
    {"f_iflte", 3, w_iflte}, {"f_ifgt", 3, w_ifgt},   {"f_ifgte", 3, w_ifgte},
    {"f_not", 1, w_not},     {"f_or", 2, w_or},       {"f_and", 2, w_and},
    {"f_xor", 2, w_xor},
}};

}  // namespace

const FunctionSet& FunctionSet::base() {
    static const FunctionSet set(FunctionSetTag::Base,
                                 std::span<const FunctionSpec>(kSpecs.data(), kBaseOpCount));
    return set;
}

const FunctionSet& FunctionSet::extended() {
    static const FunctionSet set(FunctionSetTag::Extended,
                                 std::span<const FunctionSpec>(kSpecs.data(), kAllOpCount));
    return set;
}

std::optional<int> FunctionSet::find(std::string_view name) const {
    for (int i = 0; i < size(); ++i) {
        if (members_[i].name == name) return i;
    }
    return std::nullopt;
}

std::string_view to_string(FunctionSetTag tag) {
    return tag == FunctionSetTag::Base ? "BASE" : "EXTENDED";
}

std::optional<FunctionSetTag> function_set_tag_from_string(std::string_view s) {
    if (s == "BASE" || s == "base") return FunctionSetTag::Base;
    if (s == "EXTENDED" || s == "extended") return FunctionSetTag::Extended;
    return std::nullopt;
}

}  // namespace safegp
