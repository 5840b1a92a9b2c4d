// Generated from data/layouts/*.txt (standard 10-05 positions fitted to a
// unit sphere).
#include "mmdec/eeg/layout.hpp"


namespace mmdec::eeg {
namespace {

struct BuiltinChannel {
  const char* name;
  double x;
  double y;
  double z;
};

constexpr BuiltinChannel kBiosemi64[] = {
    {"Fp1", -0.288103884, 0.954815701, -0.072959774},
    {"AF7", -0.544058586, 0.831788015, -0.110131524},
    {"AF3", -0.340029652, 0.918531852, 0.201690535},
    {"F1", -0.287246708, 0.744152737, 0.603097034},
    {"F3", -0.533121092, 0.727167098, 0.432446427},
    {"F5", -0.699975069, 0.692717813, 0.173715095},
    {"F7", -0.762632969, 0.633670501, -0.129817764},
    {"FT7", -0.927275387, 0.349463697, -0.134296244},
    {"FC5", -0.878150524, 0.396868744, 0.267108324},
    {"FC3", -0.670932885, 0.432483818, 0.602334467},
    {"FC1", -0.362056315, 0.441785436, 0.820817186},
    {"C1", -0.383379727, 0.069100150, 0.921002255},
    {"C3", -0.720078842, 0.054695998, 0.691733192},
    {"C5", -0.943151235, 0.033754651, 0.330645385},
    {"T7", -0.993077440, 0.007550555, -0.117218546},
    {"TP7", -0.942644364, -0.322736572, -0.085221518},
    {"CP5", -0.884220197, -0.328241034, 0.332283714},
    {"CP3", -0.668777417, -0.314769408, 0.673540635},
    {"CP1", -0.355876629, -0.299215304, 0.885337239},
    {"P1", -0.287716920, -0.622128249, 0.728131455},
    {"P3", -0.544162971, -0.626938606, 0.557525466},
    {"P5", -0.719899359, -0.629522787, 0.292311431},
    {"P7", -0.790246884, -0.611828384, -0.034291270},
    {"P9", -0.722671059, -0.558217339, -0.407602678},
    {"PO7", -0.567507966, -0.823091381, 0.021337435},
    {"PO3", -0.377690910, -0.849630517, 0.368072766},
    {"O1", -0.300858421, -0.950240868, 0.080786778},
    {"Iz", -0.008680925, -0.973810395, -0.227195855},
    {"Oz", -0.008116269, -0.990016984, 0.140714242},
    {"POz", -0.007042033, -0.863625735, 0.504084317},
    {"Pz", -0.005642769, -0.618311942, 0.785912528},
    {"CPz", -0.005098086, -0.296485228, 0.955023832},
    {"Fpz", -0.007628614, 0.999707439, -0.022952998},
    {"Fp2", 0.273472016, 0.959073137, -0.073428703},
    {"AF8", 0.532835710, 0.838870370, -0.111277169},
    {"AF4", 0.338437379, 0.917991779, 0.206763718},
    {"AFz", -0.006589029, 0.941958618, 0.335664337},
    {"Fz", -0.006013568, 0.752633057, 0.658412727},
    {"F2", 0.288971132, 0.750354805, 0.594527840},
    {"F4", 0.529777857, 0.738335695, 0.417367733},
    {"F6", 0.700198970, 0.694910011, 0.163772645},
    {"F8", 0.756313019, 0.640522994, -0.133119917},
    {"FT8", 0.920827537, 0.365159335, -0.136876980},
    {"FC6", 0.874398565, 0.407066470, 0.264053097},
    {"FC4", 0.669055599, 0.440240144, 0.598793137},
    {"FC2", 0.354936551, 0.451680811, 0.818538020},
    {"FCz", -0.005455633, 0.447771262, 0.894131497},
    {"Cz", -0.005128352, 0.075111847, 0.997161928},
    {"C2", 0.385447257, 0.073834754, 0.919771081},
    {"C4", 0.723616137, 0.063013581, 0.687320140},
    {"C6", 0.944263516, 0.044491477, 0.326170080},
    {"T8", 0.992569861, 0.019402005, -0.120119249},
    {"TP8", 0.942816154, -0.321711015, -0.087176390},
    {"CP6", 0.889229425, -0.317625168, 0.329219199},
    {"CP4", 0.676747239, -0.308730189, 0.668355329},
    {"CP2", 0.366929323, -0.297762245, 0.881306143},
    {"P2", 0.298174392, -0.613734384, 0.731041817},
    {"P4", 0.548916249, -0.620504340, 0.560058315},
    {"P6", 0.716181023, -0.633457097, 0.292945127},
    {"P8", 0.787314804, -0.615539119, -0.035312772},
    {"P10", 0.715115513, -0.565618550, -0.410713354},
    {"PO8", 0.560096547, -0.828165952, 0.020808989},
    {"PO4", 0.365171565, -0.857054209, 0.363466382},
    {"O2", 0.288993466, -0.953901828, 0.080957270},
};

constexpr BuiltinChannel kIcl63[] = {
    {"Fp1", -0.288103884, 0.954815701, -0.072959774},
    {"AF7", -0.544058586, 0.831788015, -0.110131524},
    {"AF3", -0.340029652, 0.918531852, 0.201690535},
    {"F1", -0.287246708, 0.744152737, 0.603097034},
    {"F3", -0.533121092, 0.727167098, 0.432446427},
    {"F5", -0.699975069, 0.692717813, 0.173715095},
    {"F7", -0.762632969, 0.633670501, -0.129817764},
    {"FT7", -0.927275387, 0.349463697, -0.134296244},
    {"FC5", -0.878150524, 0.396868744, 0.267108324},
    {"FC3", -0.670932885, 0.432483818, 0.602334467},
    {"FC1", -0.362056315, 0.441785436, 0.820817186},
    {"C1", -0.383379727, 0.069100150, 0.921002255},
    {"C3", -0.720078842, 0.054695998, 0.691733192},
    {"C5", -0.943151235, 0.033754651, 0.330645385},
    {"T7", -0.993077440, 0.007550555, -0.117218546},
    {"TP7", -0.942644364, -0.322736572, -0.085221518},
    {"CP5", -0.884220197, -0.328241034, 0.332283714},
    {"CP3", -0.668777417, -0.314769408, 0.673540635},
    {"CP1", -0.355876629, -0.299215304, 0.885337239},
    {"P1", -0.287716920, -0.622128249, 0.728131455},
    {"P3", -0.544162971, -0.626938606, 0.557525466},
    {"P5", -0.719899359, -0.629522787, 0.292311431},
    {"P7", -0.790246884, -0.611828384, -0.034291270},
    {"PO7", -0.567507966, -0.823091381, 0.021337435},
    {"PO3", -0.377690910, -0.849630517, 0.368072766},
    {"O1", -0.300858421, -0.950240868, 0.080786778},
    {"Oz", -0.008116269, -0.990016984, 0.140714242},
    {"POz", -0.007042033, -0.863625735, 0.504084317},
    {"Pz", -0.005642769, -0.618311942, 0.785912528},
    {"CPz", -0.005098086, -0.296485228, 0.955023832},
    {"Fp2", 0.273472016, 0.959073137, -0.073428703},
    {"AF8", 0.532835710, 0.838870370, -0.111277169},
    {"AF4", 0.338437379, 0.917991779, 0.206763718},
    {"AFz", -0.006589029, 0.941958618, 0.335664337},
    {"Fz", -0.006013568, 0.752633057, 0.658412727},
    {"F2", 0.288971132, 0.750354805, 0.594527840},
    {"F4", 0.529777857, 0.738335695, 0.417367733},
    {"F6", 0.700198970, 0.694910011, 0.163772645},
    {"F8", 0.756313019, 0.640522994, -0.133119917},
    {"FT8", 0.920827537, 0.365159335, -0.136876980},
    {"FC6", 0.874398565, 0.407066470, 0.264053097},
    {"FC4", 0.669055599, 0.440240144, 0.598793137},
    {"FC2", 0.354936551, 0.451680811, 0.818538020},
    {"FCz", -0.005455633, 0.447771262, 0.894131497},
    {"Cz", -0.005128352, 0.075111847, 0.997161928},
    {"C2", 0.385447257, 0.073834754, 0.919771081},
    {"C4", 0.723616137, 0.063013581, 0.687320140},
    {"C6", 0.944263516, 0.044491477, 0.326170080},
    {"T8", 0.992569861, 0.019402005, -0.120119249},
    {"TP8", 0.942816154, -0.321711015, -0.087176390},
    {"CP6", 0.889229425, -0.317625168, 0.329219199},
    {"CP4", 0.676747239, -0.308730189, 0.668355329},
    {"CP2", 0.366929323, -0.297762245, 0.881306143},
    {"P2", 0.298174392, -0.613734384, 0.731041817},
    {"P4", 0.548916249, -0.620504340, 0.560058315},
    {"P6", 0.716181023, -0.633457097, 0.292945127},
    {"P8", 0.787314804, -0.615539119, -0.035312772},
    {"PO8", 0.560096547, -0.828165952, 0.020808989},
    {"O2", 0.288993466, -0.953901828, 0.080957270},
    {"FT9", -0.817338690, 0.300366774, -0.491667843},
    {"FT10", 0.811562725, 0.302679226, -0.499751168},
    {"TP9", -0.843183139, -0.290855327, -0.452156360},
    {"TP10", 0.837628419, -0.298403511, -0.457530301},
};

template <std::size_t N>
ChannelLayout from_table(const BuiltinChannel (&table)[N]) {
  std::vector<std::string> names;
  std::vector<Position> positions;
  for (const auto& c : table) {
    names.emplace_back(c.name);
    positions.push_back(normalized({c.x, c.y, c.z}));
  }
  return ChannelLayout(std::move(names), std::move(positions));
}

}  // namespace

ChannelLayout ChannelLayout::biosemi64() { return from_table(kBiosemi64); }

ChannelLayout ChannelLayout::icl63() { return from_table(kIcl63); }

}  // namespace mmdec::eeg
