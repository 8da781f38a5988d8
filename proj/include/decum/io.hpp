#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "decum/lifetimes.hpp"
#include "decum/optimizer.hpp"
#include "decum/oracle.hpp"

namespace decum {

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_number(const std::string& field, std::size_t row) {
    if (field.empty()) throw csv_error("empty numeric field", row);
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(field, &used);
    } catch (const std::exception&) {
        throw csv_error("not a number: \"" + field + "\"", row);
    }
    while (used < field.size() && (field[used] == ' ' || field[used] == '\t')) ++used;
    if (used != field.size()) throw csv_error("trailing junk in field: \"" + field + "\"", row);
    return v;
}

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace detail

// Life-table CSV: header `age,qx,improvement_pct`, one row per integer age.
inline life_table load_life_table(std::istream& in) {
    std::string line;
    std::size_t row = 0;
    life_table t;
    bool first_data = true;
    int prev_age = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || (row == 1 && line.rfind("age,", 0) == 0)) {
            if (row == 1 && line != "age,qx,improvement_pct")
                throw csv_error("expected header age,qx,improvement_pct", row);
            continue;
        }
        const auto f = detail::split_csv_line(line);
        if (f.size() != 3) throw csv_error("expected 3 columns", row);
        const double age = detail::parse_number(f[0], row);
        const double q = detail::parse_number(f[1], row);
        const double imp = detail::parse_number(f[2], row);
        const int age_i = static_cast<int>(age);
        if (age != age_i) throw csv_error("age must be an integer", row);
        if (q < 0.0 || q > 1.0) throw csv_error("qx outside [0,1]", row);
        if (first_data) {
            t.start_age = age_i;
            first_data = false;
        } else if (age_i != prev_age + 1) {
            throw csv_error("ages must be consecutive", row);
        }
        prev_age = age_i;
        t.qx.push_back(q);
        t.improvement_pct.push_back(imp);
    }
    if (t.qx.empty()) throw csv_error("life table has no data rows", row == 0 ? 1 : row);
    return t;
}

inline life_table load_life_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw csv_error("cannot open life table: " + path, 0);
    return load_life_table(in);
}

// Care-incidence CSV: header `years_since_67,proportion_active`.
struct care_table {
    std::vector<double> times;
    std::vector<double> proportions;
};

inline care_table load_care_table(std::istream& in) {
    std::string line;
    std::size_t row = 0;
    care_table t;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || (row == 1 && line.rfind("years_since_67,", 0) == 0)) {
            if (row == 1 && line != "years_since_67,proportion_active")
                throw csv_error("expected header years_since_67,proportion_active", row);
            continue;
        }
        const auto f = detail::split_csv_line(line);
        if (f.size() != 2) throw csv_error("expected 2 columns", row);
        const double time = detail::parse_number(f[0], row);
        const double prop = detail::parse_number(f[1], row);
        if (time < 0.0) throw csv_error("years_since_67 must be non-negative", row);
        if (prop <= 0.0 || prop > 1.0) throw csv_error("proportion outside (0,1]", row);
        t.times.push_back(time);
        t.proportions.push_back(prop);
    }
    if (t.times.empty()) throw csv_error("care table has no data rows", row == 0 ? 1 : row);
    return t;
}

inline care_table load_care_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw csv_error("cannot open care table: " + path, 0);
    return load_care_table(in);
}

// Annual retirement expenditure inputs; the constant target blends the two
// age bands 2:1 to avoid overstating late-life spending.
struct are_input {
    double are_67_84 = 0;
    double are_85plus = 0;
    double w0_wealth = 0;
};

struct consumption_result {
    double are_star = 0;
    double c = 0;
};

inline consumption_result consumption_rate(const are_input& a) {
    require(a.are_67_84 > 0.0 && a.are_85plus > 0.0 && a.w0_wealth > 0.0,
            "ARE inputs must be positive");
    consumption_result out;
    out.are_star = (2.0 * a.are_67_84 + a.are_85plus) / 3.0;
    out.c = out.are_star / a.w0_wealth;
    return out;
}

// grid.csv: vehicle,w,phi,mean,second_moment,variance,shortfall_prob,feasible
inline void write_grid_csv(std::ostream& out, const cell_surfaces& s) {
    out << "vehicle,w,phi,mean,second_moment,variance,shortfall_prob,feasible\n";
    for (std::size_t i = 0; i < s.ws.size(); ++i) {
        for (std::size_t j = 0; j < s.phis.size(); ++j) {
            const std::size_t k = s.idx(i, j);
            const double var = s.second_moment[k] - s.mean[k] * s.mean[k];
            out << vehicle_name(s.veh) << ',' << detail::fmt(s.ws[i]) << ','
                << detail::fmt(s.phis[j]) << ',' << detail::fmt(s.mean[k]) << ','
                << detail::fmt(s.second_moment[k]) << ',' << detail::fmt(var) << ','
                << detail::fmt(s.shortfall_prob[k]) << ',' << (s.admissible[k] ? 1 : 0)
                << '\n';
        }
    }
}

// Decision labels: the winning vehicle, "drawdown" when the optimal payment
// rate is zero, "infeasible" when no strategy meets the tolerance.
inline std::string map_label(const optimum& o) {
    if (!o.feasible) return "infeasible";
    if (o.phi == 0.0) return "drawdown";
    return vehicle_name(o.veh);
}

// map.csv: b,psi,vehicle,w,phi,q_star,feasible
inline void write_map_csv(std::ostream& out, const decision_map& m) {
    out << "b,psi,vehicle,w,phi,q_star,feasible\n";
    for (std::size_t ib = 0; ib < m.bs.size(); ++ib) {
        for (std::size_t ip = 0; ip < m.psis.size(); ++ip) {
            const optimum& o = m.cells[m.idx(ib, ip)];
            out << detail::fmt(m.bs[ib]) << ',' << detail::fmt(m.psis[ip]) << ','
                << map_label(o) << ',';
            if (o.feasible) {
                out << detail::fmt(o.w) << ',' << detail::fmt(o.phi) << ','
                    << detail::fmt(o.q_star) << ",1\n";
            } else {
                out << "nan,nan,nan,0\n";
            }
        }
    }
}

// oracle.csv: quantity,closed_form,mc_estimate,std_error,z_score
inline void write_oracle_csv(std::ostream& out, const std::vector<oracle_row>& rows) {
    out << "quantity,closed_form,mc_estimate,std_error,z_score\n";
    for (const oracle_row& r : rows) {
        out << r.quantity << ',' << detail::fmt(r.closed_form) << ','
            << detail::fmt(r.mc_value) << ',' << detail::fmt(r.std_error) << ','
            << detail::fmt(r.z_score) << '\n';
    }
}

} // namespace decum
