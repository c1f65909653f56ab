#pragma once

#include "ifed/core/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace ifed::bench {

using boost::property_tree::ptree;

inline std::string format_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Key/value parameters of one benchmark run. Every value read through this
/// class is recorded, so the report can carry the complete configuration
/// including defaults that were not present in the file.
class Parameters
{
public:
    Parameters() = default;
    explicit Parameters(ptree values) : values_(std::move(values)) {}

    /// Reads section `name` of an INI file; a missing section gives an empty set.
    static Parameters from_ini(const std::string& path, const std::string& section)
    {
        ptree tree;
        try
        {
            boost::property_tree::read_ini(path, tree);
        }
        catch (const boost::property_tree::ini_parser_error& e)
        {
            throw Error("cannot read config '" + path + "': " + e.message());
        }
        return Parameters(tree.get_child(section, ptree{}));
    }

    /// Applies "key=value" (leading section prefix "name." is accepted and stripped).
    void set(const std::string& assignment)
    {
        const auto eq = assignment.find('=');
        IFED_REQUIRE(eq != std::string::npos && eq > 0, "override must look like key=value: '" + assignment + "'");
        std::string key = assignment.substr(0, eq);
        if (const auto dot = key.rfind('.'); dot != std::string::npos) key = key.substr(dot + 1);
        values_.put(key, assignment.substr(eq + 1));
    }
    void set(const std::string& key, const std::string& value) { values_.put(key, value); }
    void set(const std::string& key, double value) { values_.put(key, format_number(value)); }

    void erase(const std::string& key) { values_.erase(key); }

    bool has(const std::string& key) const { return values_.get_optional<std::string>(key).has_value(); }

    double number(const std::string& key, double fallback)
    {
        double v = fallback;
        if (auto s = values_.get_optional<std::string>(key))
        {
            try
            {
                std::size_t used = 0;
                v = std::stod(*s, &used);
                if (used != s->size()) throw std::invalid_argument(key);
            }
            catch (const std::exception&)
            {
                throw UnsupportedConfiguration("parameter '" + key + "' is not a number: '" + *s + "'");
            }
        }
        used_[key] = format_number(v);
        return v;
    }

    int integer(const std::string& key, int fallback)
    {
        const double v = number(key, fallback);
        IFED_REQUIRE(v == static_cast<int>(v), "parameter '" + key + "' must be an integer");
        return static_cast<int>(v);
    }

    std::string text(const std::string& key, const std::string& fallback)
    {
        std::string v = values_.get<std::string>(key, fallback);
        used_[key] = v;
        return v;
    }

    /// Keys in the input that no benchmark code asked for (usually typos).
    std::vector<std::string> unused_keys() const
    {
        std::vector<std::string> out;
        for (const auto& [k, v] : values_)
            if (!used_.count(k)) out.push_back(k);
        return out;
    }

    void require_all_used() const
    {
        const auto extra = unused_keys();
        if (extra.empty()) return;
        std::string msg = "unknown parameter(s):";
        for (const auto& k : extra) msg += " " + k;
        throw UnsupportedConfiguration(msg);
    }

    /// "key=value;..." over every parameter read, sorted by key.
    std::string canonical() const
    {
        std::string out;
        for (const auto& [k, v] : used_)
        {
            if (!out.empty()) out += ';';
            out += k + '=' + v;
        }
        return out;
    }

    const std::map<std::string, std::string>& used() const noexcept { return used_; }

private:
    ptree values_;
    std::map<std::string, std::string> used_;
};

} // namespace ifed::bench
