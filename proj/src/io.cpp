#include "meanreflect/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "meanreflect/errors.hpp"

namespace meanreflect::io {

std::string format_double(double v) {
    if (v == 0.0) v = 0.0;  // drop the sign of -0
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InvalidArgumentError("cannot open '" + tmp + "' for writing");
        out << content;
        if (!out.good()) throw InvalidArgumentError("write to '" + tmp + "' failed");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw InvalidArgumentError("cannot rename '" + tmp + "' to '" + path + "'");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double side_value(const Barrier& b, std::size_t i, double absent) {
    return b ? b->value(i) : absent;
}

}  // namespace

std::string solution_csv(const MeanSolution& sol) {
    std::ostringstream out;
    out << "t,y,l,u,lbar,ubar,k,eh,x_mean,x_std\n";
    for (std::size_t i = 0; i < sol.grid->size(); ++i) {
        out << format_double(sol.grid->point(i)) << ',' << format_double(sol.y.value(i)) << ','
            << format_double(side_value(sol.barriers.lower, i, -kInf)) << ','
            << format_double(side_value(sol.barriers.upper, i, kInf)) << ','
            << format_double(side_value(sol.transformed.lower, i, -kInf)) << ','
            << format_double(side_value(sol.transformed.upper, i, kInf)) << ','
            << format_double(sol.k.value(i)) << ',' << format_double(sol.eh.value(i)) << ','
            << format_double(sol.x_mean.value(i)) << ',' << format_double(sol.x_std.value(i))
            << '\n';
    }
    return out.str();
}

MeanSolution parse_solution_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "t,y,l,u,lbar,ubar,k,eh,x_mean,x_std")
        throw InvalidArgumentError("unrecognised solution CSV header");
    std::vector<std::vector<double>> cols(10);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::size_t c = 0;
        while (std::getline(row, cell, ',')) {
            if (c >= 10) throw InvalidArgumentError("solution CSV row with too many columns");
            cols[c++].push_back(std::strtod(cell.c_str(), nullptr));
        }
        if (c != 10) throw InvalidArgumentError("solution CSV row with too few columns");
    }
    if (cols[0].size() < 2) throw InvalidArgumentError("solution CSV needs at least two rows");

    MeanSolution sol;
    auto grid = std::make_shared<TimeGrid>(cols[0]);
    sol.grid = grid;
    sol.y = GridPath(grid, cols[1]);
    auto side = [&](const std::vector<double>& vals) -> Barrier {
        bool absent = true;
        for (double v : vals)
            if (std::isfinite(v)) absent = false;
        if (absent) return std::nullopt;
        return GridPath(grid, vals);
    };
    sol.barriers.lower = side(cols[2]);
    sol.barriers.upper = side(cols[3]);
    sol.transformed.lower = side(cols[4]);
    sol.transformed.upper = side(cols[5]);
    sol.k = GridPath(grid, cols[6]);
    sol.eh = GridPath(grid, cols[7]);
    sol.x_mean = GridPath(grid, cols[8]);
    sol.x_std = GridPath(grid, cols[9]);
    return sol;
}

std::string deterministic_csv(const GridPath& y, const BarrierPair& barriers,
                              const SkorokhodSolution& sol) {
    std::ostringstream out;
    out << "t,y,l,u,k,x\n";
    const TimeGridPtr grid = sol.k.grid();
    const GridPath yr = y.resample(grid);
    Barrier lr = barriers.lower ? Barrier(barriers.lower->resample(grid)) : std::nullopt;
    Barrier ur = barriers.upper ? Barrier(barriers.upper->resample(grid)) : std::nullopt;
    for (std::size_t i = 0; i < grid->size(); ++i) {
        out << format_double(grid->point(i)) << ',' << format_double(yr.value(i)) << ','
            << format_double(side_value(lr, i, -kInf)) << ','
            << format_double(side_value(ur, i, kInf)) << ',' << format_double(sol.k.value(i))
            << ',' << format_double(sol.x.value(i)) << '\n';
    }
    return out.str();
}

}  // namespace meanreflect::io
