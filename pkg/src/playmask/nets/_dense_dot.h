#ifndef PLAYMASK_DENSE_DOT_H
#define PLAYMASK_DENSE_DOT_H

double playmask_dot(const double* w, const double* h, int n);

#endif
