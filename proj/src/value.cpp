#include "modernize/value.hpp"

#include "modernize/util.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace modernize::pred {

namespace {

constexpr std::int64_t kMaxUnits = INT64_MAX / 2;

bool units_in_range(__int128 v) {
    return v <= kMaxUnits && v >= -static_cast<__int128>(kMaxUnits);
}

/// Round a 128-bit intermediate half away from zero when dividing by div.
std::optional<std::int64_t> div_round(__int128 num, __int128 div) {
    if (div == 0) return std::nullopt;
    bool neg = (num < 0) != (div < 0);
    __int128 an = num < 0 ? -num : num;
    __int128 ad = div < 0 ? -div : div;
    __int128 q = (an + ad / 2) / ad;
    if (neg) q = -q;
    if (!units_in_range(q)) return std::nullopt;
    return static_cast<std::int64_t>(q);
}

} // namespace

Decimal Decimal::from_units(std::int64_t units) {
    Decimal d;
    d.units_ = units;
    return d;
}

Decimal Decimal::from_int(std::int64_t whole) {
    return from_units(whole * kScale);
}

Decimal Decimal::from_double(double d) {
    return from_units(static_cast<std::int64_t>(std::llround(d * kScale)));
}

std::optional<Decimal> Decimal::parse(const std::string& text) {
    if (text.empty()) return std::nullopt;
    std::size_t i = 0;
    bool neg = false;
    if (text[i] == '-' || text[i] == '+') {
        neg = text[i] == '-';
        ++i;
    }
    std::int64_t whole = 0;
    bool any_digit = false;
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
        whole = whole * 10 + (text[i] - '0');
        if (whole > kMaxUnits / kScale) return std::nullopt;
        any_digit = true;
    }
    std::int64_t frac = 0;
    int frac_digits = 0;
    if (i < text.size() && text[i] == '.') {
        ++i;
        for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
            if (frac_digits < 4) {
                frac = frac * 10 + (text[i] - '0');
                ++frac_digits;
            } else if (frac_digits == 4) {
                return std::nullopt; // more precision than scale 4 carries
            }
            any_digit = true;
        }
    }
    if (!any_digit || i != text.size()) return std::nullopt;
    while (frac_digits < 4) {
        frac *= 10;
        ++frac_digits;
    }
    std::int64_t units = whole * kScale + frac;
    return from_units(neg ? -units : units);
}

std::string Decimal::str() const {
    std::int64_t u = units_;
    std::string sign;
    if (u < 0) {
        sign = "-";
        u = -u;
    }
    std::int64_t whole = u / kScale;
    std::int64_t frac = u % kScale;
    if (frac == 0) return sign + std::to_string(whole);
    char buf[8];
    std::snprintf(buf, sizeof buf, "%04lld", static_cast<long long>(frac));
    std::string f(buf);
    while (f.size() > 1 && f.back() == '0') f.pop_back();
    return sign + std::to_string(whole) + "." + f;
}

std::optional<Decimal> Decimal::add(Decimal other) const {
    __int128 r = static_cast<__int128>(units_) + other.units_;
    if (!units_in_range(r)) return std::nullopt;
    return from_units(static_cast<std::int64_t>(r));
}

std::optional<Decimal> Decimal::sub(Decimal other) const {
    __int128 r = static_cast<__int128>(units_) - other.units_;
    if (!units_in_range(r)) return std::nullopt;
    return from_units(static_cast<std::int64_t>(r));
}

std::optional<Decimal> Decimal::mul(Decimal other) const {
    __int128 r = static_cast<__int128>(units_) * other.units_;
    auto q = div_round(r, kScale);
    if (!q) return std::nullopt;
    return from_units(*q);
}

std::optional<Decimal> Decimal::div(Decimal other) const {
    if (other.units_ == 0) return std::nullopt;
    __int128 num = static_cast<__int128>(units_) * kScale;
    auto q = div_round(num, other.units_);
    if (!q) return std::nullopt;
    return from_units(*q);
}

std::optional<Decimal> Value::as_number() const {
    if (is_int()) {
        std::int64_t v = as_int();
        if (v > kMaxUnits / Decimal::kScale || v < -(kMaxUnits / Decimal::kScale)) {
            return std::nullopt;
        }
        return Decimal::from_int(v);
    }
    if (is_decimal()) return as_decimal();
    return std::nullopt;
}

bool Value::operator==(const Value& other) const {
    // Cross-type numeric equality: 30 == 30.0000.
    if (is_numeric() && other.is_numeric()) {
        auto a = as_number();
        auto b = other.as_number();
        return a && b && *a == *b;
    }
    return data == other.data;
}

std::string Value::str() const {
    if (is_null()) return "null";
    if (is_int()) return std::to_string(as_int());
    if (is_decimal()) return as_decimal().str();
    if (is_bool()) return as_bool() ? "true" : "false";
    if (is_string()) return "'" + as_string() + "'";
    std::string out = "[";
    const auto& l = as_list();
    for (std::size_t i = 0; i < l.size(); ++i) {
        if (i) out += ", ";
        out += l[i].str();
    }
    return out + "]";
}

const Value* Environment::lookup(const std::string& path) const {
    auto it = bindings_.find(path);
    return it == bindings_.end() ? nullptr : &it->second;
}

Environment Environment::merged(const Environment& overlay) const {
    Environment out = *this;
    for (const auto& [k, v] : overlay.bindings_) out.bind(k, v);
    return out;
}

nlohmann::json value_to_json(const Value& v) {
    if (v.is_null()) return nullptr;
    if (v.is_int()) return v.as_int();
    if (v.is_decimal()) return v.as_decimal().to_double();
    if (v.is_string()) return v.as_string();
    if (v.is_bool()) return v.as_bool();
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : v.as_list()) arr.push_back(value_to_json(e));
    return arr;
}

Value value_from_json(const nlohmann::json& j) {
    if (j.is_null()) return Value::null();
    if (j.is_boolean()) return Value(j.get<bool>());
    if (j.is_number_integer()) return Value(j.get<std::int64_t>());
    if (j.is_number_float()) return Value(Decimal::from_double(j.get<double>()));
    if (j.is_string()) return Value(j.get<std::string>());
    if (j.is_array()) {
        ValueList l;
        for (const auto& e : j) l.push_back(value_from_json(e));
        return Value(std::move(l));
    }
    throw Error("BAD_VALUE", "unsupported JSON value kind: " + std::string(j.type_name()));
}

nlohmann::json env_to_json(const Environment& env) {
    nlohmann::json obj = nlohmann::json::object();
    for (const auto& [k, v] : env.bindings()) obj[k] = value_to_json(v);
    return obj;
}

Environment env_from_json(const nlohmann::json& j) {
    Environment env;
    for (auto it = j.begin(); it != j.end(); ++it) {
        env.bind(it.key(), value_from_json(it.value()));
    }
    return env;
}

} // namespace modernize::pred
