#include "magsq/tables.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "magsq/enumerate.hpp"

namespace magsq {

CountTable count_h_table(int r, int n_max) {
    if (r < 0 || n_max < 0) throw std::invalid_argument("count_h_table: negative argument");
    CountTable t;
    t.r = r;
    if (r == 0) {
        for (int n = 0; n <= n_max; ++n) t.values[n] = 1;
    } else if (r == 1) {
        for (int n = 0; n <= n_max; ++n) t.values[n] = factorial(n);
    } else if (r == 2) {
        auto h = h_r2_table(n_max);
        for (int n = 0; n <= n_max; ++n) t.values[n] = h[static_cast<std::size_t>(n)];
    } else {
        for (int n = 0; n <= n_max; ++n) t.values[n] = transfer_count_h(n, r);
    }
    return t;
}

CountTable count_f_table(int r, int n_max) {
    if (r < 0) throw std::invalid_argument("count_f_table: negative r");
    CountTable t;
    t.r = r;
    if (r == 0) {
        // the zero matrix splits into n trivial components; nothing is
        // irreducible beyond n = 1
        if (n_max >= 1) t.values[1] = 1;
        for (int n = 2; n <= n_max; ++n) t.values[n] = 0;
        return t;
    }
    if (r == 1) {
        if (n_max >= 1) t.values[1] = 1;
        for (int n = 2; n <= n_max; ++n) t.values[n] = 0;
        return t;
    }
    if (r == 2) {
        for (int n = 1; n <= n_max; ++n) t.values[n] = f_r2_closed_form(n);
        return t;
    }
    CountTable h = count_h_table(r, n_max);
    RationalSeries hs = series_from_count_table(h, n_max);
    RationalSeries fs = series_log(hs);
    for (int n = 1; n <= n_max; ++n) {
        mpz_class fac = factorial(n);
        mpq_class scaled = fs[n] * mpq_class(fac * fac);
        scaled.canonicalize();
        if (scaled.get_den() != 1 || scaled < 0)
            throw std::logic_error("count_f_table: log transform gave a non-integral count at n=" +
                                   std::to_string(n));
        t.values[n] = scaled.get_num();
    }
    return t;
}

mpz_class count_h(int n, int r) {
    if (r == 0) return 1;
    if (r == 1) return factorial(n);
    if (r == 2) return h_r2_table(n)[static_cast<std::size_t>(n)];
    return transfer_count_h(n, r);
}

namespace {

nlohmann::json table_to_json(const char* kind, const CountTable& t) {
    nlohmann::json j;
    j["kind"] = kind;
    j["r"] = t.r;
    nlohmann::json vals = nlohmann::json::object();
    for (const auto& [n, v] : t.values) vals[std::to_string(n)] = v.get_str();
    j["values"] = std::move(vals);
    return j;
}

CountTable table_from_json(const nlohmann::json& j) {
    CountTable t;
    t.r = j.at("r").get<int>();
    for (const auto& [key, v] : j.at("values").items())
        t.values[std::stoi(key)] = mpz_class(v.get<std::string>());
    return t;
}

}  // namespace

CountCache CountCache::load(const std::string& path) {
    CountCache cache;
    std::ifstream in(path);
    if (!in) return cache;
    std::ostringstream buf;
    buf << in.rdbuf();
    nlohmann::json j = nlohmann::json::parse(buf.str());
    for (const auto& entry : j.at("tables")) {
        CountTable t = table_from_json(entry);
        const std::string kind = entry.at("kind").get<std::string>();
        if (kind == "H")
            cache.h_[t.r] = std::move(t);
        else if (kind == "f")
            cache.f_[t.r] = std::move(t);
        else
            throw std::invalid_argument("CountCache: unknown table kind '" + kind + "'");
    }
    return cache;
}

void CountCache::save(const std::string& path) const {
    nlohmann::json j;
    j["tables"] = nlohmann::json::array();
    for (const auto& [r, t] : h_) j["tables"].push_back(table_to_json("H", t));
    for (const auto& [r, t] : f_) j["tables"].push_back(table_to_json("f", t));
    std::ofstream out(path);
    if (!out) throw std::runtime_error("CountCache: cannot write " + path);
    out << j.dump(2) << "\n";
}

const CountTable& CountCache::h_table(int r, int n_max) {
    auto it = h_.find(r);
    if (it == h_.end() || !it->second.covers(0, n_max)) h_[r] = count_h_table(r, n_max);
    return h_[r];
}

const CountTable& CountCache::f_table(int r, int n_max) {
    auto it = f_.find(r);
    if (it == f_.end() || !it->second.covers(1, n_max)) f_[r] = count_f_table(r, n_max);
    return f_[r];
}

namespace {

std::optional<std::string> compare_tables(const char* kind, const CountTable& cached,
                                          const CountTable& fresh) {
    for (const auto& [n, v] : cached.values) {
        auto it = fresh.values.find(n);
        if (it == fresh.values.end())
            return std::string(kind) + " table r=" + std::to_string(cached.r) +
                   " has an entry outside the recomputable range at n=" + std::to_string(n);
        if (it->second != v)
            return std::string(kind) + " table r=" + std::to_string(cached.r) + " disagrees at n=" +
                   std::to_string(n) + ": cached " + v.get_str() + ", recomputed " + it->second.get_str();
    }
    return std::nullopt;
}

}  // namespace

std::optional<std::string> CountCache::verify_consistency() const {
    for (const auto& [r, t] : h_) {
        if (t.values.empty()) continue;
        if (auto bad = compare_tables("H", t, count_h_table(r, t.values.rbegin()->first))) return bad;
    }
    for (const auto& [r, t] : f_) {
        if (t.values.empty()) continue;
        if (auto bad = compare_tables("f", t, count_f_table(r, t.values.rbegin()->first))) return bad;
    }
    return std::nullopt;
}

}  // namespace magsq
