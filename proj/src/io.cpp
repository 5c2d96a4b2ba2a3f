#include "modernize/io.hpp"

#include "modernize/util.hpp"

#include <fstream>
#include <mutex>
#include <sstream>

namespace modernize::io {

namespace fs = std::filesystem;

namespace {

std::string canonical_str(const fs::path& p) {
    std::error_code ec;
    fs::path abs = fs::weakly_canonical(p, ec);
    if (ec) abs = fs::absolute(p, ec);
    return abs.lexically_normal().string();
}

bool path_under(const std::string& path, const std::string& root) {
    if (path.size() < root.size()) return false;
    if (path.compare(0, root.size(), root) != 0) return false;
    return path.size() == root.size() || path[root.size()] == '/' ||
           root.back() == '/';
}

} // namespace

AccessGuard& AccessGuard::instance() {
    static AccessGuard g;
    return g;
}

void AccessGuard::guard(const fs::path& root) {
    std::lock_guard<std::mutex> lock(mutex_);
    guarded_roots_.push_back(canonical_str(root));
}

void AccessGuard::unguard(const fs::path& root) {
    std::lock_guard<std::mutex> lock(mutex_);
    std::string key = canonical_str(root);
    for (auto it = guarded_roots_.rbegin(); it != guarded_roots_.rend(); ++it) {
        if (*it == key) {
            guarded_roots_.erase(std::next(it).base());
            return;
        }
    }
}

bool AccessGuard::is_guarded(const fs::path& path) const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::string key = canonical_str(path);
    for (const auto& root : guarded_roots_) {
        if (path_under(key, root)) return true;
    }
    return false;
}

void AccessGuard::record_read(const fs::path& path) {
    std::string key = canonical_str(path);
    {
        std::lock_guard<std::mutex> lock(mutex_);
        read_log_.push_back(key);
        for (const auto& root : guarded_roots_) {
            if (path_under(key, root)) {
                throw Error("GUARDED_PATH_READ",
                            "read of withheld path " + key + " during pipeline phase");
            }
        }
    }
}

std::vector<std::string> AccessGuard::reads_under(const fs::path& root) const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::string key = canonical_str(root);
    std::vector<std::string> hits;
    for (const auto& r : read_log_) {
        if (path_under(r, key)) hits.push_back(r);
    }
    return hits;
}

void AccessGuard::clear_log() {
    std::lock_guard<std::mutex> lock(mutex_);
    read_log_.clear();
}

ScopedGuard::ScopedGuard(fs::path root) : root_(std::move(root)) {
    AccessGuard::instance().guard(root_);
}

ScopedGuard::~ScopedGuard() {
    AccessGuard::instance().unguard(root_);
}

std::string read_text_file(const fs::path& path) {
    AccessGuard::instance().record_read(path);
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("UNREADABLE_FILE", "cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("UNWRITABLE_FILE", "cannot open " + path.string() + " for writing");
    }
    out << content;
}

} // namespace modernize::io
