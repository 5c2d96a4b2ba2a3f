#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace modernize::pred {

/// Exact fixed-point decimal, scale 4. The domain is billing/banking, so
/// values are stored as an int64 count of 1/10000 units; arithmetic never
/// goes through binary floating point. Multiplication and division round
/// half away from zero back to scale 4.
class Decimal {
public:
    static constexpr std::int64_t kScale = 10000;

    Decimal() = default;
    static Decimal from_units(std::int64_t units);
    static Decimal from_int(std::int64_t whole);
    static std::optional<Decimal> parse(const std::string& text);
    static Decimal from_double(double d);

    std::int64_t units() const { return units_; }
    double to_double() const { return static_cast<double>(units_) / kScale; }
    bool is_integral() const { return units_ % kScale == 0; }

    /// Canonical rendering: minimal fractional digits, at least one
    /// ("2.5", "0.0001", "30" renders as "30.0" only via JSON; here "30").
    std::string str() const;

    std::optional<Decimal> add(Decimal other) const;
    std::optional<Decimal> sub(Decimal other) const;
    std::optional<Decimal> mul(Decimal other) const;
    std::optional<Decimal> div(Decimal other) const;

    auto operator<=>(const Decimal&) const = default;

private:
    std::int64_t units_ = 0;
};

struct Value;
using ValueList = std::vector<Value>;

/// Closed runtime value set: integer, decimal, string, boolean, null, list.
struct Value {
    using Storage =
        std::variant<std::monostate, std::int64_t, Decimal, std::string, bool, ValueList>;
    Storage data;

    Value() : data(std::monostate{}) {}
    Value(std::int64_t v) : data(v) {}
    Value(int v) : data(static_cast<std::int64_t>(v)) {}
    Value(Decimal v) : data(v) {}
    Value(std::string v) : data(std::move(v)) {}
    Value(const char* v) : data(std::string(v)) {}
    Value(bool v) : data(v) {}
    Value(ValueList v) : data(std::move(v)) {}

    static Value null() { return Value(); }

    bool is_null() const { return std::holds_alternative<std::monostate>(data); }
    bool is_int() const { return std::holds_alternative<std::int64_t>(data); }
    bool is_decimal() const { return std::holds_alternative<Decimal>(data); }
    bool is_numeric() const { return is_int() || is_decimal(); }
    bool is_string() const { return std::holds_alternative<std::string>(data); }
    bool is_bool() const { return std::holds_alternative<bool>(data); }
    bool is_list() const { return std::holds_alternative<ValueList>(data); }

    std::int64_t as_int() const { return std::get<std::int64_t>(data); }
    Decimal as_decimal() const { return std::get<Decimal>(data); }
    const std::string& as_string() const { return std::get<std::string>(data); }
    bool as_bool() const { return std::get<bool>(data); }
    const ValueList& as_list() const { return std::get<ValueList>(data); }

    /// Numeric values promote to scale-4 decimal; nullopt on overflow or
    /// when not numeric.
    std::optional<Decimal> as_number() const;

    bool operator==(const Value& other) const;
    std::string str() const;
};

/// Evaluation context: field path -> value. Immutable by convention;
/// merged() produces extended copies.
class Environment {
public:
    Environment() = default;
    explicit Environment(std::map<std::string, Value> bindings)
        : bindings_(std::move(bindings)) {}

    void bind(const std::string& path, Value v) { bindings_[path] = std::move(v); }
    const Value* lookup(const std::string& path) const;
    bool contains(const std::string& path) const { return bindings_.count(path) > 0; }
    const std::map<std::string, Value>& bindings() const { return bindings_; }
    std::size_t size() const { return bindings_.size(); }

    /// this ∪ overlay, overlay wins on collisions.
    Environment merged(const Environment& overlay) const;

    bool operator==(const Environment&) const = default;

private:
    std::map<std::string, Value> bindings_;
};

/// JSON <-> Value mapping used by every document format: JSON integers map
/// to integer, JSON floats to decimal, arrays to lists.
nlohmann::json value_to_json(const Value& v);
Value value_from_json(const nlohmann::json& j);
nlohmann::json env_to_json(const Environment& env);
Environment env_from_json(const nlohmann::json& j);

} // namespace modernize::pred
