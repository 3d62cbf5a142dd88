#include <array>
#include <span>
#include <string>
#include <string_view>

#include "ecgemd/denoise.hpp"
#include "ecgemd/error.hpp"

namespace ecgemd {
namespace {

// Orthonormal scaling filters, sum = sqrt(2), sum of squares = 1.
constexpr std::array<double, 2> kDb1 = {0.70710678118654752, 0.70710678118654752};
constexpr std::array<double, 4> kDb2 = {0.48296291314453414, 0.83651630373780791, 0.22414386804201338, -0.12940952255126038};
constexpr std::array<double, 6> kDb3 = {0.33267055295008262, 0.80689150931109258, 0.45987750211849157, -0.13501102001025459, -0.085441273882026662, 0.035226291885709537};
constexpr std::array<double, 8> kDb4 = {0.2303778133088965, 0.71484657055291565, 0.63088076792985891, -0.027983769416859854, -0.18703481171909308, 0.030841381835560764, 0.0328830116668852, -0.010597401785069032};
constexpr std::array<double, 10> kDb5 = {0.16010239797419291, 0.60382926979718967, 0.72430852843777293, 0.13842814590132073, -0.24229488706638203, -0.032244869584638375, 0.077571493840045714, -0.0062414902127982743, -0.012580751999081999, 0.0033357252854737713};
constexpr std::array<double, 12> kDb6 = {0.11154074335010946, 0.49462389039845309, 0.75113390802109535, 0.31525035170919763, -0.22626469396543982, -0.12976686756726194, 0.097501605587323049, 0.027522865530305729, -0.03158203931748603, 0.00055384220116149614, 0.0047772575109455106, -0.0010773010853084796};
constexpr std::array<double, 14> kDb7 = {0.077852054085009179, 0.39653931948191731, 0.72913209084623512, 0.46978228740519312, -0.14390600392856498, -0.22403618499387498, 0.071309219266830265, 0.080612609151083072, -0.038029936935014414, -0.016574541630666881, 0.012550998556099841, 0.00042957797292136652, -0.0018016407040474909, 0.00035371379997452025};
constexpr std::array<double, 16> kDb8 = {0.05441584224310401, 0.31287159091429997, 0.67563073629728981, 0.58535468365420671, -0.015829105256349306, -0.28401554296154693, 0.00047248457391328277, 0.12874742662047846, -0.017369301001807546, -0.044088253930794752, 0.013981027917398282, 0.0087460940474057767, -0.0048703529934515743, -0.00039174037337694705, 0.00067544940645056937, -0.00011747678412476953};
constexpr std::array<double, 18> kDb9 = {0.038077947363878347, 0.24383467461259035, 0.60482312369011111, 0.65728807805130054, 0.13319738582500758, -0.29327378327917491, -0.096840783222976461, 0.14854074933810638, 0.030725681479333379, -0.067632829061329974, 0.00025094711483145196, 0.022361662123679097, -0.0047232047577513973, -0.0042815036824634298, 0.0018476468830562265, 0.00023038576352319597, -0.00025196318894271014, 0.000039347320316271599};
constexpr std::array<double, 20> kDb10 = {0.026670057900555554, 0.18817680007769149, 0.52720118893172559, 0.68845903945360357, 0.28117234366057746, -0.24984642432731538, -0.19594627437737704, 0.12736934033579326, 0.093057364603572351, -0.071394147166397087, -0.029457536821875813, 0.033212674059341002, 0.0036065535669561697, -0.010733175483330575, 0.0013953517470529012, 0.0019924052951850561, -0.00068585669495971163, -0.00011646685512928545, 0.000093588670320069591, -0.000013264202894521245};

}  // namespace

std::span<const double> daubechies_lowpass(std::string_view name) {
    if (name == "haar" || name == "db1") return kDb1;
    if (name == "db2") return kDb2;
    if (name == "db3") return kDb3;
    if (name == "db4") return kDb4;
    if (name == "db5") return kDb5;
    if (name == "db6") return kDb6;
    if (name == "db7") return kDb7;
    if (name == "db8") return kDb8;
    if (name == "db9") return kDb9;
    if (name == "db10") return kDb10;
    throw ConfigError("unknown wavelet '" + std::string(name) + "' (expected haar or db1..db10)");
}

}  // namespace ecgemd
