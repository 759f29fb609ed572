#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <doctest.h>

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("every math-map row names exactly one declared function") {
    const fs::path root(HCINV_SOURCE_DIR);
    const std::string map = slurp(root / "docs" / "math_map.md");
    REQUIRE_FALSE(map.empty());

    std::vector<std::string> headers;
    for (const auto& e : fs::directory_iterator(root / "core" / "include" / "hcinv"))
        if (e.path().extension() == ".hpp") headers.push_back(slurp(e.path()));

    std::istringstream lines(map);
    std::string line;
    std::size_t rows = 0;
    while (std::getline(lines, line)) {
        if (line.rfind("| ", 0) != 0 || line.find('`') == std::string::npos) continue;
        const std::string last = line.substr(line.rfind('|', line.size() - 2));
        const std::regex tick("`([A-Za-z_][A-Za-z0-9_]*)`");
        for (auto it = std::sregex_iterator(last.begin(), last.end(), tick); it != std::sregex_iterator(); ++it) {
            const std::string name = (*it)[1];
            // a declaration: return type, the name, an opening parenthesis
            const std::regex decl("\\n[A-Za-z_][A-Za-z0-9_:<>]*[ &*]+" + name + "\\(");
            std::size_t found = 0;
            for (const auto& h : headers)
                found += std::distance(std::sregex_iterator(h.begin(), h.end(), decl), std::sregex_iterator());
            INFO("function: " << name);
            CHECK(found == 1);
            ++rows;
        }
    }
    CHECK(rows >= 30);
}
