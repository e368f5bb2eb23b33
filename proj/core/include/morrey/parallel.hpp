#ifndef MORREY_PARALLEL_HPP_
#define MORREY_PARALLEL_HPP_

namespace morrey {

/// Number of worker threads used by the cell loops. Results do not depend on
/// it: every reduction is done per grid row and then summed in row order.
void set_thread_count(int n);
int thread_count();

}  // namespace morrey

#endif  // MORREY_PARALLEL_HPP_
