#include "homsvm/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include "homsvm/rng.hpp"

namespace homsvm {

namespace {

void validate(const Dataset& data) {
    if (data.n < 1) throw std::invalid_argument("dataset: need at least one point");
    if (data.d < 1) throw std::invalid_argument("dataset: dimension must be at least 1");
    if (data.xs.size() != static_cast<std::size_t>(data.n) * data.d ||
        data.ys.size() != static_cast<std::size_t>(data.n))
        throw std::invalid_argument("dataset: size mismatch between points and labels");
    for (double y : data.ys)
        if (y != 1.0 && y != -1.0)
            throw std::invalid_argument("dataset: label must be -1 or +1");
    for (double v : data.xs)
        if (!std::isfinite(v))
            throw std::invalid_argument("dataset: coordinates must be finite");
}

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_number(const std::string& field, int lineno) {
    const char* s = field.c_str();
    char* end = nullptr;
    double v = std::strtod(s, &end);
    if (end == s || *end != '\0')
        throw std::runtime_error("read_csv line " + std::to_string(lineno) +
                                 ": non-numeric field '" + field + "'");
    return v;
}

}  // namespace

Dataset make_dataset(const std::vector<std::vector<double>>& points,
                     const std::vector<double>& labels) {
    if (points.size() != labels.size())
        throw std::invalid_argument("dataset: size mismatch between points and labels");
    if (points.empty())
        throw std::invalid_argument("dataset: need at least one point");
    Dataset data;
    data.n = static_cast<int>(points.size());
    data.d = static_cast<int>(points[0].size());
    data.xs.reserve(points.size() * points[0].size());
    for (const auto& p : points) {
        if (static_cast<int>(p.size()) != data.d)
            throw std::invalid_argument("dataset: inconsistent point dimensions");
        data.xs.insert(data.xs.end(), p.begin(), p.end());
    }
    data.ys = labels;
    validate(data);
    return data;
}

Dataset canonical_dataset(const std::vector<int>& filler_multipliers) {
    std::vector<int> ms = filler_multipliers;
    std::sort(ms.begin(), ms.end());
    for (std::size_t i = 0; i < ms.size(); ++i) {
        if (ms[i] < 2)
            throw std::invalid_argument("canonical_dataset: multipliers must be integers >= 2");
        if (i > 0 && ms[i] == ms[i - 1])
            throw std::invalid_argument("canonical_dataset: multipliers must be distinct");
    }
    const double sv[4][2] = {{0.5, 1.5}, {1.5, 0.5}, {-0.5, -1.5}, {-1.5, -0.5}};
    const double lab[4] = {1.0, 1.0, -1.0, -1.0};
    std::vector<std::vector<double>> pts;
    std::vector<double> ys;
    for (int i = 0; i < 4; ++i) {
        pts.push_back({sv[i][0], sv[i][1]});
        ys.push_back(lab[i]);
    }
    for (int m : ms)
        for (int i = 0; i < 4; ++i) {
            pts.push_back({m * sv[i][0], m * sv[i][1]});
            ys.push_back(lab[i]);
        }
    return make_dataset(pts, ys);
}

Dataset scaled_dataset(const Dataset& base, int axis, double factor) {
    if (axis < 0 || axis >= base.d)
        throw std::invalid_argument("scaled_dataset: axis out of range");
    if (factor == 0.0)
        throw std::invalid_argument("scaled_dataset: factor must be nonzero");
    Dataset out = base;
    for (int j = 0; j < out.n; ++j)
        out.xs[static_cast<std::size_t>(j) * out.d + axis] *= factor;
    return out;
}

Dataset random_separable(std::uint64_t seed, int n, int d, double margin,
                         std::vector<double>* direction) {
    if (n < 2) throw std::invalid_argument("random_separable: n must be >= 2");
    if (d < 1) throw std::invalid_argument("random_separable: d must be >= 1");
    if (!(margin > 0.0)) throw std::invalid_argument("random_separable: margin must be > 0");
    Rng rng(seed);
    std::vector<double> u(d);
    double nu = 0.0;
    do {
        nu = 0.0;
        for (int c = 0; c < d; ++c) {
            u[c] = rng.gaussian();
            nu += u[c] * u[c];
        }
        nu = std::sqrt(nu);
    } while (nu < 1e-9);
    for (int c = 0; c < d; ++c) u[c] /= nu;

    std::vector<std::vector<double>> pts(n, std::vector<double>(d));
    std::vector<double> ys(n);
    for (int j = 0; j < n; ++j) {
        double proj = 0.0;
        for (int c = 0; c < d; ++c) {
            pts[j][c] = 2.0 * rng.gaussian();
            proj += pts[j][c] * u[c];
        }
        double y = proj >= 0.0 ? 1.0 : -1.0;
        double m = y * proj;
        if (m < margin) {
            // push along u with a little headroom so rounding cannot land below the target
            double shift = (margin * (1.0 + 1e-9) - m) * y;
            for (int c = 0; c < d; ++c) pts[j][c] += shift * u[c];
        }
        ys[j] = y;
    }
    if (direction != nullptr) *direction = u;
    return make_dataset(pts, ys);
}

double max_point_norm(const Dataset& data) {
    double best = 0.0;
    for (int j = 0; j < data.n; ++j) {
        const double* x = data.x(j);
        double s = 0.0;
        for (int c = 0; c < data.d; ++c) s += x[c] * x[c];
        best = std::max(best, s);
    }
    return std::sqrt(best);
}

void write_csv(const Dataset& data, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_csv: cannot open " + path);
    f << "y";
    for (int c = 1; c <= data.d; ++c) f << ",x" << c;
    f << "\n";
    for (int j = 0; j < data.n; ++j) {
        f << g17(data.ys[j]);
        for (int c = 0; c < data.d; ++c) f << "," << g17(data.x(j)[c]);
        f << "\n";
    }
    if (!f) throw std::runtime_error("write_csv: write failed for " + path);
}

Dataset read_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_csv: cannot open " + path);
    std::string line;
    if (!std::getline(f, line)) throw std::runtime_error("read_csv: " + path + " is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> head = split(line, ',');
    if (head.empty() || head[0] != "y")
        throw std::runtime_error("read_csv line 1: header must start with column y");
    int d = static_cast<int>(head.size()) - 1;
    if (d < 1) throw std::runtime_error("read_csv line 1: need at least one coordinate column");
    for (int c = 1; c <= d; ++c)
        if (head[c] != "x" + std::to_string(c))
            throw std::runtime_error("read_csv line 1: expected column x" + std::to_string(c) +
                                     ", got '" + head[c] + "'");

    std::vector<std::vector<double>> pts;
    std::vector<double> ys;
    int lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;  // tolerate a trailing blank line
        std::vector<std::string> fields = split(line, ',');
        if (static_cast<int>(fields.size()) != d + 1)
            throw std::runtime_error("read_csv line " + std::to_string(lineno) + ": expected " +
                                     std::to_string(d + 1) + " fields, got " +
                                     std::to_string(fields.size()));
        double y = parse_number(fields[0], lineno);
        if (y != 1.0 && y != -1.0)
            throw std::runtime_error("read_csv line " + std::to_string(lineno) +
                                     ": label must be -1 or +1");
        std::vector<double> p(d);
        for (int c = 0; c < d; ++c) {
            p[c] = parse_number(fields[c + 1], lineno);
            if (!std::isfinite(p[c]))
                throw std::runtime_error("read_csv line " + std::to_string(lineno) +
                                         ": coordinate must be finite");
        }
        pts.push_back(std::move(p));
        ys.push_back(y);
    }
    if (pts.empty()) throw std::runtime_error("read_csv: " + path + " has no data rows");
    return make_dataset(pts, ys);
}

}  // namespace homsvm
