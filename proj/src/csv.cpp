#include "stabilab/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "stabilab/errors.hpp"

namespace stabilab {

namespace {

void put_double(std::ostream& os, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

}  // namespace

void write_moments_csv(std::ostream& os, const MomentSeries& series) {
    if (series.weighted.empty())
        throw InputError("write_moments_csv: series has no weighted aggregate");
    const int d = series.dim();
    os << "t";
    for (int i = 1; i <= d; ++i) os << ",m" << i;
    os << ",V,se_V,n_alive\n";
    for (std::int64_t r = 0; r < series.rows(); ++r) {
        put_double(os, series.times[r]);
        for (int i = 0; i < d; ++i) {
            os << ",";
            put_double(os, series.component_moments[i][r]);
        }
        os << ",";
        put_double(os, series.weighted[r]);
        os << ",";
        put_double(os, series.weighted_se[r]);
        os << "," << series.n_alive[r] << "\n";
    }
}

void write_moments_csv_file(const std::string& path, const MomentSeries& series) {
    std::ofstream f(path, std::ios::binary);  // binary keeps LF endings everywhere
    if (!f) throw InputError("cannot open for writing: " + path);
    write_moments_csv(f, series);
}

MomentSeries read_moments_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw InputError("read_moments_csv: empty input");

    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    if (header.size() < 5 || header.front() != "t" || header.back() != "n_alive")
        throw InputError("read_moments_csv: unexpected header");
    const int d = static_cast<int>(header.size()) - 4;

    MomentSeries s;
    s.component_moments.assign(d, {});
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (static_cast<int>(cells.size()) != d + 4)
            throw InputError("read_moments_csv: wrong column count in row");
        s.times.push_back(std::stod(cells[0]));
        for (int i = 0; i < d; ++i) s.component_moments[i].push_back(std::stod(cells[1 + i]));
        s.weighted.push_back(std::stod(cells[d + 1]));
        s.weighted_se.push_back(std::stod(cells[d + 2]));
        s.n_alive.push_back(std::stoll(cells[d + 3]));
    }
    if (s.times.empty()) throw InputError("read_moments_csv: no data rows");

    std::int64_t m_bar = 0;
    for (double t : s.times)
        if (t < 0.0) ++m_bar;
    s.m_bar = m_bar;
    s.delta = s.times.size() > 1 ? s.times[1] - s.times[0] : 0.0;
    s.n_paths = s.n_alive.empty() ? 0 : s.n_alive.front();
    return s;
}

MomentSeries read_moments_csv_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open for reading: " + path);
    return read_moments_csv(f);
}

}  // namespace stabilab
