#pragma once

#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

namespace modernize::io {

/// Read a whole file as bytes. Routes through the access guard so guarded
/// (withheld) directories are enforced and every read is recorded.
std::string read_text_file(const std::filesystem::path& path);

/// Write a file, creating parent directories as needed.
void write_text_file(const std::filesystem::path& path, const std::string& content);

/// Process-wide read instrumentation. run_pipeline guards a scenario's gold
/// directory for the duration of the pipeline phase; a read under a guarded
/// root throws GUARDED_PATH_READ. The recorded read log lets tests audit
/// that no gold path was touched even without the guard active.
class AccessGuard {
public:
    static AccessGuard& instance();

    void guard(const std::filesystem::path& root);
    void unguard(const std::filesystem::path& root);
    bool is_guarded(const std::filesystem::path& path) const;

    void record_read(const std::filesystem::path& path);
    std::vector<std::string> reads_under(const std::filesystem::path& root) const;
    void clear_log();

private:
    AccessGuard() = default;
    mutable std::mutex mutex_;
    std::vector<std::string> guarded_roots_;
    std::vector<std::string> read_log_;
};

/// RAII activation of a guard root.
class ScopedGuard {
public:
    explicit ScopedGuard(std::filesystem::path root);
    ~ScopedGuard();
    ScopedGuard(const ScopedGuard&) = delete;
    ScopedGuard& operator=(const ScopedGuard&) = delete;

private:
    std::filesystem::path root_;
};

} // namespace modernize::io
