#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace pointscat::cli
{
using Cell = std::variant<double, std::string>;
using Row = std::vector<Cell>;

//! Output table; the column set is fixed per subcommand.
struct Table
{
    std::vector<std::string> columns;
    std::vector<std::string> units;
    std::vector<Row> rows;
    std::vector<std::pair<std::string, double>> footer;
};

//! Shortest form with 17 significant digits.
inline std::string format_number(double v)
{
    if (std::isnan(v))
    {
        return "nan";
    }
    if (std::isinf(v))
    {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_csv(std::ostream& os, Table const& t)
{
    auto join = [&os](std::vector<std::string> const& items) {
        for (std::size_t i = 0; i < items.size(); ++i)
        {
            if (i)
            {
                os << ',';
            }
            os << items[i];
        }
        os << '\n';
    };
    os << "# units,";
    join(t.units);
    join(t.columns);
    for (auto const& row : t.rows)
    {
        for (std::size_t i = 0; i < row.size(); ++i)
        {
            if (i)
            {
                os << ',';
            }
            if (auto const* d = std::get_if<double>(&row[i]))
            {
                os << format_number(*d);
            }
            else
            {
                os << std::get<std::string>(row[i]);
            }
        }
        os << '\n';
    }
    for (auto const& [key, value] : t.footer)
    {
        os << "# " << key << ',' << format_number(value) << '\n';
    }
}

inline nlohmann::json to_json(Table const& t,
                              std::string const& subcommand,
                              nlohmann::json const& inputs)
{
    nlohmann::json out;
    out["subcommand"] = subcommand;
    out["inputs"] = inputs;
    out["columns"] = t.columns;
    out["units"] = t.units;
    auto rows = nlohmann::json::array();
    for (auto const& row : t.rows)
    {
        auto r = nlohmann::json::array();
        for (auto const& c : row)
        {
            if (auto const* d = std::get_if<double>(&c))
            {
                r.push_back(std::isfinite(*d) ? nlohmann::json(*d)
                                              : nlohmann::json(nullptr));
            }
            else
            {
                r.push_back(std::get<std::string>(c));
            }
        }
        rows.push_back(std::move(r));
    }
    out["rows"] = std::move(rows);
    auto footer = nlohmann::json::object();
    for (auto const& [key, value] : t.footer)
    {
        footer[key] = std::isfinite(value) ? nlohmann::json(value)
                                           : nlohmann::json(nullptr);
    }
    out["footer"] = std::move(footer);
    return out;
}

//---------------------------------------------------------------------------//
/*!
 * Evaluate fn(i) for i in [0, n) on up to \c threads workers.
 *
 * Results are stored by index so output order never depends on scheduling.
 * The first exception (lowest index) is rethrown on the calling thread.
 */
template<class F>
auto parallel_map(std::size_t n, unsigned threads, F const& fn)
    -> std::vector<decltype(fn(std::size_t{}))>
{
    using R = decltype(fn(std::size_t{}));
    std::vector<R> results(n);
    std::vector<std::exception_ptr> errors(n);
    unsigned const workers
        = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));

    auto work = [&](unsigned w) {
        for (std::size_t i = w; i < n; i += workers)
        {
            try
            {
                results[i] = fn(i);
            }
            catch (...)
            {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers <= 1)
    {
        work(0);
    }
    else
    {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
        {
            pool.emplace_back(work, w);
        }
        for (auto& t : pool)
        {
            t.join();
        }
    }
    for (auto const& e : errors)
    {
        if (e)
        {
            std::rethrow_exception(e);
        }
    }
    return results;
}

}  // namespace pointscat::cli
