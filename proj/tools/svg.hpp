#pragma once

// Drawing of rank-2 apartments. Chambers are filled by a caller-supplied colour
// and labelled by a caller-supplied string, usually the height.

#include <ep/apartment.hpp>

#include <fmt/format.h>

#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>

namespace epv {

class Rank2Figure {
public:
    explicit Rank2Figure(const ep::Apartment& apt) : apt_(apt) {
        if (apt.rank() != 2) throw std::invalid_argument("SVG output needs a rank-2 apartment");
        // orthonormal frame of the plane spanned by the two fundamental coweights
        auto w = apt.roots().fundamental_coweights_ambient();
        std::vector<std::vector<double>> v(2);
        for (int i = 0; i < 2; ++i)
            for (const auto& x : w[i]) v[i].push_back(x.get_d());
        auto ip = [](const std::vector<double>& a, const std::vector<double>& b) {
            double s = 0;
            for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
            return s;
        };
        e1_ = v[0];
        const double n1 = std::sqrt(ip(e1_, e1_));
        for (auto& x : e1_) x /= n1;
        e2_ = v[1];
        const double c = ip(e2_, e1_);
        for (std::size_t k = 0; k < e2_.size(); ++k) e2_[k] -= c * e1_[k];
        const double n2 = std::sqrt(ip(e2_, e2_));
        for (auto& x : e2_) x /= n2;
        for (int i = 0; i < 2; ++i) {
            basis_[i][0] = ip(v[i], e1_);
            basis_[i][1] = ip(v[i], e2_);
        }
    }

    std::array<double, 2> point(const ep::IntVec& scaled) const {
        const double s = static_cast<double>(apt_.scale());
        const double a = scaled[0] / s, b = scaled[1] / s;
        return {a * basis_[0][0] + b * basis_[1][0], -(a * basis_[0][1] + b * basis_[1][1])};
    }

    std::string render(const ep::Ball& ball, const std::function<std::string(int)>& fill,
                       const std::function<std::string(int)>& label, const std::string& title) const {
        double lo_x = 1e300, lo_y = 1e300, hi_x = -1e300, hi_y = -1e300;
        for (const auto& c : ball.chambers)
            for (const auto& v : c.vertices) {
                auto p = point(v);
                lo_x = std::min(lo_x, p[0]);
                hi_x = std::max(hi_x, p[0]);
                lo_y = std::min(lo_y, p[1]);
                hi_y = std::max(hi_y, p[1]);
            }
        const double size = 900.0, margin = 20.0;
        const double span = std::max(hi_x - lo_x, hi_y - lo_y);
        const double k = span > 0 ? (size - 2 * margin) / span : 1.0;
        auto sx = [&](double x) { return margin + (x - lo_x) * k; };
        auto sy = [&](double y) { return margin + (y - lo_y) * k; };
        const double width = sx(hi_x) + margin, height = sy(hi_y) + margin;
        const double font = std::max(4.0, std::min(14.0, k * 0.18));

        std::string out;
        out += fmt::format(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.1f}\" height=\"{:.1f}\" viewBox=\"0 0 {:.1f} "
            "{:.1f}\">\n",
            width, height, width, height);
        out += fmt::format("<title>{}</title>\n", title);
        out += "<g stroke=\"#333\" stroke-width=\"0.6\">\n";
        for (std::size_t i = 0; i < ball.size(); ++i) {
            const auto& c = ball.chambers[i];
            std::string pts;
            for (const auto& v : c.vertices) {
                auto p = point(v);
                pts += fmt::format("{}{:.2f},{:.2f}", pts.empty() ? "" : " ", sx(p[0]), sy(p[1]));
            }
            out += fmt::format("<polygon points=\"{}\" fill=\"{}\"/>\n", pts, fill(static_cast<int>(i)));
        }
        out += "</g>\n";
        out += fmt::format("<g font-family=\"sans-serif\" font-size=\"{:.1f}\" text-anchor=\"middle\" "
                           "dominant-baseline=\"central\">\n",
                           font);
        for (std::size_t i = 0; i < ball.size(); ++i) {
            const std::string text = label(static_cast<int>(i));
            if (text.empty()) continue;
            double x = 0, y = 0;
            for (const auto& v : ball.chambers[i].vertices) {
                auto p = point(v);
                x += p[0] / 3.0;
                y += p[1] / 3.0;
            }
            out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", sx(x), sy(y), text);
        }
        out += "</g>\n</svg>\n";
        return out;
    }

private:
    const ep::Apartment& apt_;
    std::vector<double> e1_, e2_;
    std::array<std::array<double, 2>, 2> basis_{};
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << content;
}

}  // namespace epv
