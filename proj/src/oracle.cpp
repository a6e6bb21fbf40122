#include "ghsat/attack.hpp"

#include "ghsat/errors.hpp"

#include <csignal>
#include <cstring>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

namespace ghsat {

BitVector Oracle::query(const BitVector& x) {
    if (x.size() != num_inputs())
        throw ShapeError("oracle query has width " + std::to_string(x.size()) + ", expected " +
                         std::to_string(num_inputs()));
    auto it = cache_.find(x);
    if (it != cache_.end())
        return it->second;
    BitVector z = evaluate(x);
    if (z.size() != num_outputs())
        throw OracleError("oracle answered with " + std::to_string(z.size()) + " bits, expected " +
                          std::to_string(num_outputs()));
    cache_.emplace(x, z);
    return z;
}

BitVector CircuitOracle::evaluate(const BitVector& x) {
    return eval_circuit(circuit_.topology, circuit_.assignment, x);
}

HiddenInputOracle::HiddenInputOracle(Circuit c, InputPartition partition, BitVector y)
    : circuit_(std::move(c)), partition_(std::move(partition)), y_(std::move(y)) {
    if (partition_.total() != circuit_.topology.num_inputs())
        throw ShapeError("input partition does not match circuit inputs");
    if (y_.size() != partition_.num_hidden())
        throw ShapeError("hidden vector width does not match the partition");
}

BitVector HiddenInputOracle::evaluate(const BitVector& x) {
    return eval_circuit(circuit_.topology, circuit_.assignment, partition_.merge(x, y_));
}

ExternalOracle::ExternalOracle(std::string command, std::size_t n, std::size_t m)
    : command_(std::move(command)), n_(n), m_(m) {
    int down[2], up[2];
    if (pipe(down) != 0)
        throw OracleError(std::string("pipe: ") + std::strerror(errno));
    if (pipe(up) != 0) {
        close(down[0]);
        close(down[1]);
        throw OracleError(std::string("pipe: ") + std::strerror(errno));
    }
    // A dead child must surface as a read/write error, not kill the attacker.
    std::signal(SIGPIPE, SIG_IGN);
    pid_ = fork();
    if (pid_ < 0)
        throw OracleError(std::string("fork: ") + std::strerror(errno));
    if (pid_ == 0) {
        dup2(down[0], STDIN_FILENO);
        dup2(up[1], STDOUT_FILENO);
        close(down[0]);
        close(down[1]);
        close(up[0]);
        close(up[1]);
        execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(down[0]);
    close(up[1]);
    to_child_ = fdopen(down[1], "w");
    from_child_ = fdopen(up[0], "r");
    if (!to_child_ || !from_child_)
        throw OracleError("cannot open oracle pipes");
}

ExternalOracle::~ExternalOracle() {
    if (to_child_)
        std::fclose(to_child_);
    if (from_child_)
        std::fclose(from_child_);
    if (pid_ > 0) {
        int status = 0;
        waitpid(pid_, &status, 0);
    }
}

BitVector ExternalOracle::evaluate(const BitVector& x) {
    const std::string line = bits_to_string(x) + "\n";
    if (std::fputs(line.c_str(), to_child_) == EOF || std::fflush(to_child_) != 0)
        throw OracleError("oracle process closed its input");
    std::string reply;
    for (int c; (c = std::fgetc(from_child_)) != EOF && c != '\n';)
        reply.push_back(static_cast<char>(c));
    if (!reply.empty() && reply.back() == '\r')
        reply.pop_back();
    if (reply.size() != m_ || reply.find_first_not_of("01") != std::string::npos)
        throw OracleError("malformed oracle reply '" + reply + "' to query " + bits_to_string(x));
    return bits_from_string(reply);
}

} // namespace ghsat
