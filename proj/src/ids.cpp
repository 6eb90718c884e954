#include "sonarpath/ids.hpp"

#include <cctype>

namespace sonarpath {

namespace {

bool is_digit(char c) noexcept { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

} // namespace

bool natural_less(std::string_view a, std::string_view b) noexcept
{
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
        if (is_digit(a[i]) && is_digit(b[j])) {
            std::size_t ie = i;
            std::size_t je = j;
            while (ie < a.size() && is_digit(a[ie]))
                ++ie;
            while (je < b.size() && is_digit(b[je]))
                ++je;
            // strip leading zeros, then compare by width and digits
            std::size_t ia = i;
            std::size_t jb = j;
            while (ia + 1 < ie && a[ia] == '0')
                ++ia;
            while (jb + 1 < je && b[jb] == '0')
                ++jb;
            const std::size_t wa = ie - ia;
            const std::size_t wb = je - jb;
            if (wa != wb)
                return wa < wb;
            const int cmp = a.substr(ia, wa).compare(b.substr(jb, wb));
            if (cmp != 0)
                return cmp < 0;
            // "L01" vs "L1": more leading zeros sorts later
            if ((ie - i) != (je - j))
                return (ie - i) < (je - j);
            i = ie;
            j = je;
            continue;
        }
        if (a[i] != b[j])
            return static_cast<unsigned char>(a[i]) < static_cast<unsigned char>(b[j]);
        ++i;
        ++j;
    }
    return (a.size() - i) < (b.size() - j);
}

} // namespace sonarpath
