"""Command line package"""
