pub mod dd_oracle;
