"""Exact arithmetic building blocks"""
