"""Pipeline services: numeric kernels as functions, persistence as managers with global instances"""
