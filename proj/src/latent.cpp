#include "waveshape/latent.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "waveshape/errors.hpp"

namespace waveshape {

double squared_distance(const LatentCode& a, const LatentCode& b) {
    if (a.size() != b.size()) throw ShapeMismatchError("latent codes differ in length");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

void require_finite(const LatentCode& z, const char* what) {
    for (double v : z.values) {
        if (!std::isfinite(v)) throw ValidationError(std::string(what) + " has a non-finite entry");
    }
}

void save_latent(const std::filesystem::path& path, const LatentCode& z) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
    char buf[64];
    for (double v : z.values) {
        std::snprintf(buf, sizeof buf, "%.17g\n", v);
        out << buf;
    }
    if (!out) throw ValidationError("failed writing " + path.string());
}

LatentCode load_latent(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open latent file " + path.string());
    LatentCode z;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            std::size_t used = 0;
            z.values.push_back(std::stod(line, &used));
            if (line.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(line);
        } catch (const std::exception&) {
            throw ValidationError("malformed latent entry '" + line + "' in " + path.string());
        }
    }
    if (z.values.empty()) throw ValidationError("latent file " + path.string() + " is empty");
    require_finite(z, "latent file");
    return z;
}

}  // namespace waveshape
