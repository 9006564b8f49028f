#pragma once

#include "viki/domain.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace viki {

enum class ParseErrorCode {
    ParseError,
    UnknownRobot,
    BadStepNumbering,
    BadArity,
    NonNumericPoint,
    EmptyTrajectory,
};

class parse_error : public std::runtime_error {
  public:
    parse_error(ParseErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ParseErrorCode code() const { return code_; }

  private:
    ParseErrorCode code_;
};

struct TaggedResponse {
    std::string think;
    std::string answer;
    bool well_formed = false;
};

namespace detail {

inline bool is_ws_only(std::string_view s) {
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    return true;
}

inline size_t count_occurrences(std::string_view s, std::string_view needle) {
    size_t n = 0, pos = 0;
    while ((pos = s.find(needle, pos)) != std::string_view::npos) {
        ++n;
        pos += needle.size();
    }
    return n;
}

// Minimal JSON-ish value model for model answers. The prompts' own examples
// mix single- and double-quoted strings, so strict JSON parsing is not an
// option; we also need duplicate object keys to be detectable (a duplicate
// robot key inside one step is a protocol breach, not a silent overwrite).
struct Value;
using ValuePtr = std::shared_ptr<Value>;

struct Value {
    enum class Kind { Null, Bool, Number, String, Array, Object } kind = Kind::Null;
    bool boolean = false;
    double number = 0.0;
    bool is_integer = false;
    long long integer = 0;
    std::string str;
    std::vector<ValuePtr> array;
    std::vector<std::pair<std::string, ValuePtr>> object;  // insertion order

    const ValuePtr* find(std::string_view key) const {
        for (const auto& [k, v] : object)
            if (k == key) return &v;
        return nullptr;
    }
};

class ValueParser {
  public:
    explicit ValueParser(std::string_view text) : text_(text) {}

    ValuePtr parse_document() {
        skip_ws();
        ValuePtr v = parse_value();
        skip_ws();
        if (pos_ != text_.size()) fail("trailing content after value");
        return v;
    }

  private:
    std::string_view text_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw parse_error(ParseErrorCode::ParseError,
                          msg + " at offset " + std::to_string(pos_));
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    char next() {
        if (pos_ >= text_.size()) fail("unexpected end of input");
        return text_[pos_++];
    }
    void skip_ws() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    ValuePtr parse_value() {
        skip_ws();
        char c = peek();
        if (c == '{') return parse_object();
        if (c == '[') return parse_array();
        if (c == '"' || c == '\'') return parse_string();
        if (c == '-' || std::isdigit(static_cast<unsigned char>(c)))
            return parse_number();
        if (consume_word("true")) return make_bool(true);
        if (consume_word("false")) return make_bool(false);
        if (consume_word("null")) return std::make_shared<Value>();
        fail("expected a value");
    }

    bool consume_word(std::string_view w) {
        if (text_.substr(pos_, w.size()) == w) {
            pos_ += w.size();
            return true;
        }
        return false;
    }

    static ValuePtr make_bool(bool b) {
        auto v = std::make_shared<Value>();
        v->kind = Value::Kind::Bool;
        v->boolean = b;
        return v;
    }

    ValuePtr parse_string() {
        char quote = next();
        auto v = std::make_shared<Value>();
        v->kind = Value::Kind::String;
        while (true) {
            if (pos_ >= text_.size()) fail("unterminated string");
            char c = next();
            if (c == quote) break;
            if (c == '\\') {
                char e = next();
                switch (e) {
                    case 'n': v->str += '\n'; break;
                    case 't': v->str += '\t'; break;
                    case 'r': v->str += '\r'; break;
                    case '\\': v->str += '\\'; break;
                    case '"': v->str += '"'; break;
                    case '\'': v->str += '\''; break;
                    case '/': v->str += '/'; break;
                    default: fail("unsupported escape");
                }
            } else {
                v->str += c;
            }
        }
        return v;
    }

    ValuePtr parse_number() {
        size_t start = pos_;
        if (peek() == '-') ++pos_;
        bool saw_digit = false, saw_frac = false;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c))) {
                saw_digit = true;
                ++pos_;
            } else if (c == '.' || c == 'e' || c == 'E' || c == '+' ||
                       (c == '-' && (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E'))) {
                saw_frac = true;
                ++pos_;
            } else {
                break;
            }
        }
        if (!saw_digit) fail("malformed number");
        std::string tok(text_.substr(start, pos_ - start));
        auto v = std::make_shared<Value>();
        v->kind = Value::Kind::Number;
        char* end = nullptr;
        v->number = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size() || !std::isfinite(v->number))
            fail("malformed number");
        if (!saw_frac) {
            v->is_integer = true;
            v->integer = std::strtoll(tok.c_str(), nullptr, 10);
        }
        return v;
    }

    ValuePtr parse_array() {
        next();  // '['
        auto v = std::make_shared<Value>();
        v->kind = Value::Kind::Array;
        skip_ws();
        if (peek() == ']') {
            ++pos_;
            return v;
        }
        while (true) {
            v->array.push_back(parse_value());
            skip_ws();
            char c = next();
            if (c == ']') break;
            if (c != ',') fail("expected ',' or ']' in array");
        }
        return v;
    }

    ValuePtr parse_object() {
        next();  // '{'
        auto v = std::make_shared<Value>();
        v->kind = Value::Kind::Object;
        skip_ws();
        if (peek() == '}') {
            ++pos_;
            return v;
        }
        while (true) {
            skip_ws();
            if (peek() != '"' && peek() != '\'') fail("expected object key");
            std::string key = parse_string()->str;
            if (v->find(key))
                throw parse_error(ParseErrorCode::ParseError,
                                  "duplicate key '" + key + "'");
            skip_ws();
            if (next() != ':') fail("expected ':' after key");
            v->object.emplace_back(std::move(key), parse_value());
            skip_ws();
            char c = next();
            if (c == '}') break;
            if (c != ',') fail("expected ',' or '}' in object");
        }
        return v;
    }
};

inline ValuePtr parse_value_text(std::string_view text) {
    return ValueParser(text).parse_document();
}

}  // namespace detail

// Strict tag grammar: optional whitespace, one <think> block, whitespace, one
// <answer> block, optional trailing whitespace, nothing else. Malformed input
// never throws; it just reports well_formed = false.
inline TaggedResponse extract_tags(std::string_view text) {
    using detail::count_occurrences;
    TaggedResponse out;
    if (count_occurrences(text, "<think>") != 1 ||
        count_occurrences(text, "</think>") != 1 ||
        count_occurrences(text, "<answer>") != 1 ||
        count_occurrences(text, "</answer>") != 1)
        return out;

    size_t think_open = text.find("<think>");
    size_t think_close = text.find("</think>");
    size_t answer_open = text.find("<answer>");
    size_t answer_close = text.find("</answer>");
    if (!(think_open < think_close && think_close < answer_open &&
          answer_open < answer_close))
        return out;

    if (!detail::is_ws_only(text.substr(0, think_open))) return out;
    if (!detail::is_ws_only(
            text.substr(think_close + 8, answer_open - (think_close + 8))))
        return out;
    if (!detail::is_ws_only(text.substr(answer_close + 9))) return out;

    out.think = std::string(text.substr(think_open + 7, think_close - (think_open + 7)));
    out.answer =
        std::string(text.substr(answer_open + 8, answer_close - (answer_open + 8)));
    out.well_formed = true;
    return out;
}

// Parses the L1 answer, a bracketed list of quoted robot names.
inline std::set<RobotKind> parse_agent_set(std::string_view answer) {
    detail::ValuePtr v = detail::parse_value_text(answer);
    if (v->kind != detail::Value::Kind::Array)
        throw parse_error(ParseErrorCode::ParseError, "expected a list of robot names");
    std::set<RobotKind> out;
    for (const auto& item : v->array) {
        if (item->kind != detail::Value::Kind::String)
            throw parse_error(ParseErrorCode::ParseError,
                              "robot names must be quoted strings");
        auto kind = robot_kind_from_string(item->str);
        if (!kind)
            throw parse_error(ParseErrorCode::UnknownRobot,
                              "unknown robot '" + item->str + "'");
        out.insert(*kind);
    }
    return out;
}

// Parses the L2 answer: a list of {"step": n, "actions": {robot: [args...]}}
// entries. Steps must be numbered 1..N consecutively and no robot may act
// twice in one step.
inline Plan parse_plan(std::string_view answer) {
    detail::ValuePtr doc = detail::parse_value_text(answer);
    if (doc->kind != detail::Value::Kind::Array)
        throw parse_error(ParseErrorCode::ParseError, "plan must be a list of steps");

    Plan plan;
    int expected_step = 1;
    for (const auto& entry : doc->array) {
        if (entry->kind != detail::Value::Kind::Object)
            throw parse_error(ParseErrorCode::ParseError, "each step must be an object");
        const auto* step_v = entry->find("step");
        const auto* actions_v = entry->find("actions");
        if (!step_v || !actions_v)
            throw parse_error(ParseErrorCode::ParseError,
                              "step entry needs 'step' and 'actions'");
        if ((*step_v)->kind != detail::Value::Kind::Number || !(*step_v)->is_integer)
            throw parse_error(ParseErrorCode::ParseError, "'step' must be an integer");
        long long step_no = (*step_v)->integer;
        if (step_no != expected_step)
            throw parse_error(ParseErrorCode::BadStepNumbering,
                              "expected step " + std::to_string(expected_step) +
                                  ", got " + std::to_string(step_no));
        if ((*actions_v)->kind != detail::Value::Kind::Object)
            throw parse_error(ParseErrorCode::ParseError, "'actions' must be a map");

        PlanStep step;
        step.step = static_cast<int>(step_no);
        for (const auto& [robot, args] : (*actions_v)->object) {
            if (args->kind != detail::Value::Kind::Array || args->array.empty() ||
                args->array[0]->kind != detail::Value::Kind::String)
                throw parse_error(ParseErrorCode::ParseError,
                                  "action for '" + robot + "' must be a list "
                                  "starting with a primitive name");
            auto prim = primitive_from_string(args->array[0]->str);
            if (!prim)
                throw parse_error(ParseErrorCode::ParseError,
                                  "unknown primitive '" + args->array[0]->str + "'");
            size_t argc = args->array.size() - 1;
            if (argc != static_cast<size_t>(primitive_arity(*prim)))
                throw parse_error(ParseErrorCode::BadArity,
                                  std::string(to_string(*prim)) + " takes " +
                                      std::to_string(primitive_arity(*prim)) +
                                      " argument(s), got " + std::to_string(argc));
            for (size_t i = 1; i < args->array.size(); ++i)
                if (args->array[i]->kind != detail::Value::Kind::String)
                    throw parse_error(ParseErrorCode::ParseError,
                                      "action arguments must be strings");
            Action a;
            a.robot = robot;
            a.timestep = step.step;
            a.primitive = *prim;
            a.destination = args->array[1]->str;
            if (*prim == Primitive::Push) a.extra = args->array[2]->str;
            step.actions.emplace(robot, std::move(a));
        }
        plan.steps.push_back(std::move(step));
        ++expected_step;
    }
    return plan;
}

// Parses the L3 answer: a nested list of point groups; group 0 is the
// ego-trajectory. Trajectory lengths are not enforced here.
inline TrajectorySet parse_trajectories(std::string_view answer) {
    detail::ValuePtr doc = detail::parse_value_text(answer);
    if (doc->kind != detail::Value::Kind::Array || doc->array.empty())
        throw parse_error(ParseErrorCode::ParseError,
                          "expected a non-empty list of point groups");
    TrajectorySet out;
    for (const auto& group : doc->array) {
        if (group->kind != detail::Value::Kind::Array)
            throw parse_error(ParseErrorCode::ParseError, "each group must be a list");
        if (group->array.empty())
            throw parse_error(ParseErrorCode::EmptyTrajectory, "empty point group");
        Trajectory traj;
        for (const auto& pt : group->array) {
            if (pt->kind != detail::Value::Kind::Array || pt->array.size() != 2)
                throw parse_error(ParseErrorCode::ParseError,
                                  "each point must be an [x, y] pair");
            for (const auto& coord : pt->array)
                if (coord->kind != detail::Value::Kind::Number)
                    throw parse_error(ParseErrorCode::NonNumericPoint,
                                      "point coordinates must be numbers");
            traj.points.emplace_back(pt->array[0]->number, pt->array[1]->number);
        }
        out.trajectories.push_back(std::move(traj));
    }
    return out;
}

}  // namespace viki
