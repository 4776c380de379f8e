#include "pra/cli.hpp"

#include "pra/errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

namespace pra {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

bool to_double(const std::string& s, double& out)
{
    if (s.empty())
        return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+')
        ++first;
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

} // namespace

double parse_angle(const std::string& text)
{
    const std::string s = trim(text);
    const auto bad = [&] { return argument_error("cannot parse angle '" + text + "'"); };
    double value = 0.0;
    if (to_double(s, value))
        return value;

    const auto pi_at = s.find("pi");
    if (pi_at == std::string::npos)
        throw bad();

    std::string coef = trim(s.substr(0, pi_at));
    std::string rest = trim(s.substr(pi_at + 2));
    if (!coef.empty() && coef.back() == '*')
        coef = trim(coef.substr(0, coef.size() - 1));
    double c = 1.0;
    if (coef.empty() || coef == "+")
        c = 1.0;
    else if (coef == "-")
        c = -1.0;
    else if (!to_double(coef, c))
        throw bad();

    double d = 1.0;
    if (!rest.empty()) {
        if (rest.front() != '/')
            throw bad();
        if (!to_double(trim(rest.substr(1)), d) || d == 0.0)
            throw bad();
    }
    return c * std::numbers::pi / d;
}

std::vector<double> parse_angle_list(const std::string& text)
{
    std::vector<double> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        out.push_back(parse_angle(text.substr(start, comma - start)));
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    return out;
}

} // namespace pra
