#include "slung/selective_loss.hpp"

#include <sstream>

#include "json.hpp"
#include "slung/common.hpp"

namespace slung {

void save_loss_report_jsonl(const std::string& path, const TokenLossReport& report) {
    std::ostringstream ss;
    for (std::size_t i = 0; i < report.entries.size(); ++i) {
        const auto& e = report.entries[i];
        nlohmann::json j;
        j["position"] = i;
        j["mode"] = loss_mode_name(e.mode);
        j["loss"] = e.value;
        ss << j.dump() << '\n';
    }
    write_file(path, ss.str());
}

}  // namespace slung
